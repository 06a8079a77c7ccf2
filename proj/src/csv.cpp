#include "ovtsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace ovtsim {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(table.header[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(row[i]);
        }
        out << '\n';
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool row_started = false;
    std::size_t line = 1;
    std::size_t col = 1;

    auto end_cell = [&] {
        row.push_back(cell);
        cell.clear();
        ++col;
    };
    auto end_row = [&] {
        end_cell();
        if (table.header.empty()) table.header = std::move(row);
        else table.rows.push_back(std::move(row));
        row = {};
        row_started = false;
        col = 1;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!cell.empty()) {
                    throw ParseError("quote inside unquoted cell", line, col);
                }
                in_quotes = true;
                row_started = true;
                break;
            case ',':
                end_cell();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || !cell.empty() || !row.empty()) end_row();
                ++line;
                break;
            default:
                cell += c;
                row_started = true;
                break;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted cell", line, col);
    if (row_started || !cell.empty() || !row.empty()) end_row();
    return table;
}

std::string format_fixed2(Scalar v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string format_trimmed2(Scalar v) {
    std::string s = format_fixed2(v);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
    }
    return s;
}

Scalar parse_scalar_cell(const std::string& cell, std::size_t row, std::size_t col) {
    try {
        std::size_t pos = 0;
        const Scalar v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + cell + "'", row, col);
    }
}

long long parse_int_cell(const std::string& cell, std::size_t row, std::size_t col) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + cell + "'", row, col);
    }
}

}  // namespace ovtsim
