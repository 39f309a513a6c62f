#pragma once

#include <stdexcept>
#include <string>

namespace cevfb {

enum class ErrorCode {
    InvalidParameter,
    Domain,
    GridSpec,
    ModeMismatch,
    Singular,
    BoundaryEscape,
    Stagnation,
    NonConvergence,
    ConfigParse,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the core library; the C API maps `code()` onto
/// its status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace cevfb
