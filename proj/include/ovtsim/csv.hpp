#ifndef OVTSIM_CSV_HPP
#define OVTSIM_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ovtsim/errors.hpp"
#include "ovtsim/types.hpp"

namespace ovtsim {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180 style quoting: cells holding commas, quotes, or newlines are
// wrapped in double quotes with "" escapes.
std::string csv_escape(const std::string& cell);

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

// Fixed-decimal text that parses back to the same double for values already
// quantized to hundredths.
std::string format_fixed2(Scalar v);

// Hundredth-precision value with trailing zeros trimmed: 3.50 -> "3.5",
// 20.00 -> "20".
std::string format_trimmed2(Scalar v);

Scalar parse_scalar_cell(const std::string& cell, std::size_t row, std::size_t col);
long long parse_int_cell(const std::string& cell, std::size_t row, std::size_t col);

}  // namespace ovtsim

#endif  // OVTSIM_CSV_HPP
