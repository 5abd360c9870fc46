#pragma once

#include <stdexcept>
#include <string>

namespace svrsim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the file name and 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& file, int line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file_(file), line_(line) {}

    const std::string& file() const { return file_; }
    int line() const { return line_; }

private:
    std::string file_;
    int line_;
};

/// Structurally invalid network (cycle, disconnected bus, bad slack, ...).
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Power-flow failure: non-convergence or voltage collapse.
class SolveError : public Error {
public:
    using Error::Error;
};

} // namespace svrsim
