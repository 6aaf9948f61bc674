#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nief/errors.hpp"
#include "nief/io/config.hpp"

namespace nief::io {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) {
        if (row.size() != columns.size()) throw std::logic_error("table row width does not match header");
        rows.push_back(std::move(row));
    }

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        fail(NumericalError::Kind::MissingColumns, "column '" + name + "' not present");
    }
};

// Shortest round-trip form capped at 17 significant digits, '.' always.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, p);
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_double(r[i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("output: cannot write '" + path + "'");
    out << text;
}

inline Table parse_csv(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line) || trim(line).empty())
        fail(NumericalError::Kind::MissingColumns, "no header row");
    std::stringstream h(line);
    for (std::string c; std::getline(h, c, ',');) t.columns.push_back(trim(c));
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream r(line);
        for (std::string c; std::getline(r, c, ',');) {
            double v;
            if (!parse_double(c, v)) throw ValidationError("csv: not a number '" + c + "'");
            row.push_back(v);
        }
        if (row.size() != t.columns.size()) throw ValidationError("csv: row width does not match header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("csv: cannot read '" + path + "'");
    return parse_csv(in);
}

} // namespace nief::io
