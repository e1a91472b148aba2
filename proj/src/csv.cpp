#include "conglab/csv.hpp"

#include "conglab/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace conglab {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string join_csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].find(',') != std::string::npos || fields[i].find('\n') != std::string::npos) {
            throw SchemaError("CSV field may not contain a comma or newline: '" + fields[i] + "'");
        }
        if (i) out.push_back(',');
        out += fields[i];
    }
    return out;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw SchemaError("missing CSV column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open CSV file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("empty CSV file (missing header): " + path);
    }
    table.header = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != table.header.size()) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(table.header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write file: " + tmp);
        out << content;
        out.flush();
        if (!out) throw UsageError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw UsageError("rename failed for " + path + ": " + std::strerror(errno));
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string buf = join_csv_line(table.header);
    buf.push_back('\n');
    for (const auto& row : table.rows) {
        buf += join_csv_line(row);
        buf.push_back('\n');
    }
    write_text_atomic(path, buf);
}

std::string fmt_double(double v) {
    char buf[64];
    // shortest representation that round-trips
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

double parse_double(const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw SchemaError("malformed number '" + text + "'");
    }
    return v;
}

long long parse_int(const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw SchemaError("malformed integer '" + text + "'");
    }
    return v;
}

} // namespace conglab
