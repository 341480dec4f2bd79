#ifndef JINV_ERRORS_HPP
#define JINV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace jinv {

/// Thrown when a noise specification cannot support the requested analytic
/// computation (e.g. variance of a Cauchy term, decomposition under clipping).
class UnsupportedSpecError : public std::runtime_error {
public:
    explicit UnsupportedSpecError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a linear-algebra routine fails beyond recovery (factorization
/// failure after maximum jitter, singular systems).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by count-matrix normalization when rows have zero total count.
/// The message lists the offending row indices.
class DegenerateRowError : public std::runtime_error {
public:
    explicit DegenerateRowError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace jinv

#endif
