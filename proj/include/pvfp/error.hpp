#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pvfp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data. Line/column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        std::string out = what + " (line " + std::to_string(line);
        if (column != 0) out += ", column " + std::to_string(column);
        return out + ")";
    }

    std::size_t line_;
    std::size_t column_;
};

// Invalid user configuration (column mapping, split rule, flags).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input that is well-formed but cannot be analysed (empty variant, single class, ...).
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace pvfp
