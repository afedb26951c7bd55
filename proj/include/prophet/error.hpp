#pragma once

#include <stdexcept>
#include <string>

namespace prophet {

// Bad arguments or preconditions. The CLI maps this to exit code 1.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}
}  // namespace detail

}  // namespace prophet
