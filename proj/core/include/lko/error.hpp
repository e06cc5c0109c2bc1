#pragma once

#include <stdexcept>
#include <string>

namespace lko {

enum class ErrorKind {
    config,     // invalid parameters or plan
    data,       // malformed values, out-of-range states
    format,     // unparsable files
    dimension,  // shape mismatch between inputs
    size,       // oracle instance too large
    model,      // model invariants violated
    oracle,     // ground-truth sets inconsistent
    partition,  // no feasible split / contradictory centers
    io,         // filesystem failures
    contract,   // internal invariant violated
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Process exit status used by the CLI: 2 config, 3 data/format, 4 contract.
    int exit_code() const noexcept {
        switch (kind_) {
        case ErrorKind::config:
            return 2;
        case ErrorKind::contract:
            return 4;
        default:
            return 3;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

} // namespace lko
