#pragma once

#include <stdexcept>

namespace varshift {

/// Input violates an operation's contract (bad argument, malformed file, ...).
class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The data admit no meaningful estimate (zero variance, empty segment, ...).
class degenerate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative numerical routine failed to converge.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation invoked on an object in the wrong lifecycle state.
class state_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace varshift
