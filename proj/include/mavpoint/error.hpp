#pragma once

#include <stdexcept>
#include <string>

namespace mavpoint {

// Base for every error this library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that violates a schema, an invariant or an operation precondition.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mavpoint
