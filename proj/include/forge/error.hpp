#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line),
          column_(column)
    {
    }

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// A configured resource bound (term budget, search nodes) was hit.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace forge
