#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

// Minimal CSV emission: comma-separated, header row first, floats with six
// significant digits, fields quoted only when they contain , " or newline.

namespace weakfactor::csv {

inline std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string number(long long v) { return std::to_string(v); }
inline std::string number(unsigned long long v) { return std::to_string(v); }
inline std::string number(long v) { return std::to_string(v); }
inline std::string number(unsigned long v) { return std::to_string(v); }
inline std::string number(int v) { return std::to_string(v); }

inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

using Row = std::vector<std::string>;

struct Table {
    Row header;
    std::vector<Row> rows;

    void add(Row row) {
        if (row.size() != header.size()) throw std::logic_error("csv: row width does not match header");
        rows.push_back(std::move(row));
    }
};

inline void write_row(std::ostream& out, const Row& row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out << ',';
        out << escape(row[k]);
    }
    out << '\n';
}

inline void write(std::ostream& out, const Table& table) {
    write_row(out, table.header);
    for (const auto& row : table.rows) write_row(out, row);
}

}  // namespace weakfactor::csv
