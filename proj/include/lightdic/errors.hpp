#pragma once

#include <stdexcept>
#include <string>

namespace lightdic {

/// Bad user-supplied input: malformed files, out-of-range arguments,
/// dimension mismatches, missing classes. CLI exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Corrupt or stale on-disk artifacts: bad magic, truncation,
/// fingerprint mismatch. CLI exit code 3.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Cache built from a different graph than the one presented.
struct StaleCacheError : FormatError {
    explicit StaleCacheError(const std::string& msg) : FormatError(msg) {}
};

/// Non-finite values where finiteness is an invariant (NaN loss,
/// NaN propagated features). CLI exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lightdic
