#pragma once

#include <stdexcept>
#include <string>

namespace svevt {

// Input content that violates a contract (bad CSV row, misaligned series, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: divergent chain, non-convergent optimizer, degenerate fit.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Optimum pinned at the edge of the admissible region; reported separately from
// plain non-convergence so callers can distinguish the two.
class BoundaryError : public NumericError {
public:
    explicit BoundaryError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace svevt
