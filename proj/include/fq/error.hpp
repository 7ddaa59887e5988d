#pragma once

#include <stdexcept>
#include <string>

namespace fq {

// Mirrors fq_status in fq.h; values must stay in sync.
enum class ErrorCode {
    invalid_argument = 1,
    dimension_mismatch = 2,
    config = 3,
    simulation = 4,
    optimization = 5,
    numerical = 6,
    io = 7,
    no_oracle = 8,
    internal = 9,
};

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

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

}  // namespace fq
