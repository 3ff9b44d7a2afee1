#pragma once

#include <stdexcept>
#include <string>

namespace rnntc {

/// Bad user-supplied data: missing files or columns, malformed rows,
/// unknown labels, incompatible model/data pairs. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numeric breakdown during training (non-finite loss). Maps to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace rnntc
