#pragma once

#include <stdexcept>
#include <string>

namespace ftdkf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed scenario, violated model assumption, bad argument.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A factorisation failed or a condition threshold was exceeded mid-run.
class NumericalError : public Error {
public:
    using Error::Error;
};

// The delay bound's logarithm base is 1, so no finite bound exists.
class BoundUndefined : public Error {
public:
    using Error::Error;
};

void require_dims(bool ok, const std::string& what);

}  // namespace ftdkf
