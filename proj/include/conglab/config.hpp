#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conglab {

// Minimal INI-style config: `key = value` lines, `#` comments, `[section]`
// headers (dotted into keys), double-quoted strings. Sections may repeat;
// the raw section list preserves order and duplicates for block-structured
// files, while the flat view exposes dotted keys (later wins).
struct ConfigSection {
    std::string name; // empty for the preamble
    std::vector<std::pair<std::string, std::string>> entries;
    int line = 0;

    std::optional<std::string> get(const std::string& key) const;
    std::string require(const std::string& key) const;
};

struct ConfigFile {
    std::vector<ConfigSection> sections;

    std::optional<std::string> get(const std::string& dotted_key) const;
    std::string get_or(const std::string& dotted_key, const std::string& fallback) const;
    std::vector<const ConfigSection*> sections_named(const std::string& name) const;
    std::vector<std::string> keys() const;
};

ConfigFile parse_config_text(const std::string& text, const std::string& origin);
ConfigFile load_config(const std::string& path);

// Strict scalar parsers for config values. All throw SchemaError on junk.
bool config_bool(const std::string& value);
// Durations accept s/m/h suffixes ("30s", "0.5m", "1h"); a bare number means
// seconds. Must resolve to a positive whole number of seconds.
std::chrono::seconds config_duration(const std::string& value);

} // namespace conglab
