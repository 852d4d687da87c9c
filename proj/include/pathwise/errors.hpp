#pragma once

#include <stdexcept>
#include <string>

namespace pathwise {

// Invalid input: a precondition on user-supplied data was violated.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A requested moment does not exist for the process (e.g. Student-t tails).
class moment_unavailable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Operation not defined for this process variant.
class unsupported_operation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A configured size cap (enumeration state count) was exceeded.
class size_limit_error : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace pathwise
