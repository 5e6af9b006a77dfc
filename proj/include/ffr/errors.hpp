#pragma once

#include <stdexcept>
#include <string>

namespace ffr {

/// Base of every error raised by the library. `kind()` is the stable,
/// machine-readable tag written to error records by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define FFR_DEFINE_ERROR(Name, tag)                                          \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& message) : Error(tag, message) {}   \
        Name(std::string kind, const std::string& message)                   \
            : Error(std::move(kind), message) {}                             \
    };

FFR_DEFINE_ERROR(ConfigError, "config_error")
FFR_DEFINE_ERROR(RangeError, "range_error")
FFR_DEFINE_ERROR(InconsistentTaskError, "inconsistent_task")
FFR_DEFINE_ERROR(LeakageError, "leakage_error")
FFR_DEFINE_ERROR(DiagnosisUnavailable, "diagnosis_unavailable")
FFR_DEFINE_ERROR(CorruptCheckpoint, "corrupt_checkpoint")
FFR_DEFINE_ERROR(NonFiniteGradient, "non_finite_gradient")

#undef FFR_DEFINE_ERROR

}  // namespace ffr
