#ifndef OVTSIM_ERRORS_HPP
#define OVTSIM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ovtsim {

struct OutOfRoadError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct BadLaneError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct UnknownCategoryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PlacementFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadDurationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadSpeedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadInstantError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MalformedLogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Carries 1-based row/column coordinates of the offending cell.
struct ParseError : std::runtime_error {
    std::size_t row = 0;
    std::size_t col = 0;
    ParseError(const std::string& msg, std::size_t row_, std::size_t col_)
        : std::runtime_error(msg + " (row " + std::to_string(row_) + ", col " +
                             std::to_string(col_) + ")"),
          row(row_),
          col(col_) {}
};

struct SchemaMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReferentialError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateColumnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyDatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvaluatorFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ovtsim

#endif  // OVTSIM_ERRORS_HPP
