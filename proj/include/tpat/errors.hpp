#ifndef TPAT_ERRORS_HPP_
#define TPAT_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace tpat {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or extent mismatch between tensors / feature maps.
struct DimensionError : Error {
    using Error::Error;
};

// File could not be opened, read or written.
struct IoError : Error {
    using Error::Error;
};

// Malformed text input; message carries the offending line number.
struct ParseError : Error {
    using Error::Error;
};

// Invalid configuration value or combination.
struct ConfigError : Error {
    using Error::Error;
};

// Template crop fell entirely outside the frame.
struct ExtractionError : Error {
    using Error::Error;
};

inline std::string shape_str(const std::vector<int>& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

}  // namespace tpat

#endif  // TPAT_ERRORS_HPP_
