#pragma once

#include <stdexcept>
#include <string>

namespace secov {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Syntax or elaboration error with a source location attached.
struct ParseError : Error {
    ParseError(const std::string& msg, int line_no, int col_no)
        : Error(format(msg, line_no, col_no)), line(line_no), col(col_no) {}

    int line = 0;
    int col = 0;

  private:
    static std::string format(const std::string& msg, int line, int col) {
        return "line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
    }
};

/// Monitor binding failure (unresolved signal, width mismatch, clock mismatch).
struct BindError : Error {
    using Error::Error;
};

} // namespace secov
