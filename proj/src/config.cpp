#include "conglab/config.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace conglab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& value, const std::string& where) {
    if (value.size() >= 2 && value.front() == '"') {
        if (value.back() != '"')
            throw SchemaError(where + ": unterminated quoted string");
        return value.substr(1, value.size() - 2);
    }
    return value;
}

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char c : key) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

} // namespace

std::optional<std::string> ConfigSection::get(const std::string& key) const {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it)
        if (it->first == key) return it->second;
    return std::nullopt;
}

std::string ConfigSection::require(const std::string& key) const {
    auto v = get(key);
    if (!v)
        throw SchemaError("config section [" + name + "] (line " + std::to_string(line) +
                          "): missing key '" + key + "'");
    return *v;
}

std::optional<std::string> ConfigFile::get(const std::string& dotted_key) const {
    std::optional<std::string> found;
    for (const ConfigSection& sec : sections) {
        std::string prefix = sec.name.empty() ? "" : sec.name + ".";
        for (const auto& [k, v] : sec.entries)
            if (prefix + k == dotted_key) found = v;
    }
    return found;
}

std::string ConfigFile::get_or(const std::string& dotted_key, const std::string& fallback) const {
    auto v = get(dotted_key);
    return v ? *v : fallback;
}

std::vector<const ConfigSection*> ConfigFile::sections_named(const std::string& name) const {
    std::vector<const ConfigSection*> out;
    for (const ConfigSection& sec : sections)
        if (sec.name == name) out.push_back(&sec);
    return out;
}

std::vector<std::string> ConfigFile::keys() const {
    std::vector<std::string> out;
    for (const ConfigSection& sec : sections) {
        std::string prefix = sec.name.empty() ? "" : sec.name + ".";
        for (const auto& [k, v] : sec.entries) out.push_back(prefix + k);
    }
    return out;
}

ConfigFile parse_config_text(const std::string& text, const std::string& origin) {
    ConfigFile file;
    file.sections.push_back(ConfigSection{});

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string where = origin + ":" + std::to_string(lineno);
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            if (line.back() != ']')
                throw SchemaError(where + ": malformed section header '" + line + "'");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name))
                throw SchemaError(where + ": bad section name '" + name + "'");
            ConfigSection sec;
            sec.name = name;
            sec.line = lineno;
            file.sections.push_back(std::move(sec));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw SchemaError(where + ": expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw SchemaError(where + ": bad key '" + key + "'");
        // Strip trailing comments only outside quotes.
        if (!value.empty() && value[0] != '"') {
            std::size_t hash = value.find('#');
            if (hash != std::string::npos) value = trim(value.substr(0, hash));
        }
        if (value.empty())
            throw SchemaError(where + ": empty value for '" + key + "'");
        file.sections.back().entries.emplace_back(key, unquote(value, where));
    }
    return file;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

bool config_bool(const std::string& value) {
    if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
    if (value == "false" || value == "no" || value == "off" || value == "0") return false;
    throw SchemaError("expected a boolean, got '" + value + "'");
}

std::chrono::seconds config_duration(const std::string& value) {
    if (value.empty()) throw SchemaError("empty duration");
    double scale = 1.0;
    std::string number = value;
    switch (value.back()) {
    case 's': scale = 1.0; number = value.substr(0, value.size() - 1); break;
    case 'm': scale = 60.0; number = value.substr(0, value.size() - 1); break;
    case 'h': scale = 3600.0; number = value.substr(0, value.size() - 1); break;
    default: break;
    }
    double parsed = parse_double(number) * scale;
    double rounded = std::round(parsed);
    if (!(parsed > 0) || std::abs(parsed - rounded) > 1e-9)
        throw SchemaError("duration '" + value + "' must be a positive whole number of seconds");
    return std::chrono::seconds(static_cast<long long>(rounded));
}

} // namespace conglab
