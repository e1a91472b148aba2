#pragma once

#include <string>
#include <vector>

namespace conglab {

// Minimal strict CSV: comma-separated, no quoting. None of the file formats
// in this project embed commas, so a field containing one is rejected on
// write rather than quoted.

std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv_line(const std::vector<std::string>& fields);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column; throws SchemaError naming the column if absent.
    std::size_t column(const std::string& name) const;
};

// Reads a headered CSV file. Throws UsageError if unreadable, SchemaError if
// the header is missing or a row has the wrong field count.
CsvTable read_csv(const std::string& path);

// Atomic write (temp file + rename).
void write_csv(const std::string& path, const CsvTable& table);

// Atomic whole-file text write, shared by every writer in the project.
void write_text_atomic(const std::string& path, const std::string& content);

// Deterministic shortest-roundtrip-ish formatting for doubles (%.17g with
// exact integers rendered without exponent noise).
std::string fmt_double(double v);
double parse_double(const std::string& text);
long long parse_int(const std::string& text);

} // namespace conglab
