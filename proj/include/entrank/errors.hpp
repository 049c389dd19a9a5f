#pragma once

#include <stdexcept>
#include <string>

namespace entrank {

// Bad input: malformed sequence, out-of-range parameter, inconsistent context.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation was refused because it would exceed a configured size cap.
class ResourceGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace entrank
