#pragma once

#include <stdexcept>
#include <string>

namespace semilab {

enum class ErrorKind {
    precondition,
    degenerate_chart,
    empty_fiber,
    resolution,
    stiffness,
    stability,
    contamination,
    unsupported_symbol,
    singularity,
    parse,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) fail(kind, msg);
}

} // namespace semilab
