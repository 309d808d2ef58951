#pragma once

#include <stdexcept>
#include <string>

namespace embadapt {

/// Malformed or inconsistent input data (files, labels, alignment).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace embadapt
