#pragma once

#include <stdexcept>
#include <string>

namespace bwd {

/// A design or configuration parameter is out of range. `field()` names it.
class InvalidParameter : public std::invalid_argument {
public:
    InvalidParameter(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Covariate vector with Euclidean norm above 1 (+1e-9 slack).
class InputNormError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// More assignments requested than the design horizon allows.
class HorizonExceeded : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

} // namespace bwd
