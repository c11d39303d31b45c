#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace abrupt {

// Raised when a stencil window or query falls outside the observed horizon.
class WindowError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Malformed input file, with the 1-based line/row where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Internal invariant broken; indicates a bug rather than bad input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace abrupt
