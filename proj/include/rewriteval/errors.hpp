#pragma once

#include <stdexcept>
#include <string>

namespace rewriteval {

// Error taxonomy mirrors the CLI exit codes: data problems (bad files,
// malformed records, mismatched corpus sizes) exit 2, misuse of a metric
// (violated preconditions such as zero references) exit 3, and backend
// failures that survived retries exit 4.

struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct backend_error : std::runtime_error {
    explicit backend_error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitUsageError = 3;
inline constexpr int kExitBackendError = 4;

} // namespace rewriteval
