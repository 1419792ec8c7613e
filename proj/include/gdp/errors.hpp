#pragma once

#include <stdexcept>
#include <string>

namespace gdp {

/// Base of every error raised by the library. `kind()` is a stable tag used by
/// the CLI to choose an exit code.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define GDP_DEFINE_ERROR(Name)                                                 \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

// Invalid user input.
GDP_DEFINE_ERROR(ValidationError);
GDP_DEFINE_ERROR(DegenerateParameters);
GDP_DEFINE_ERROR(InvalidAmplitude);
GDP_DEFINE_ERROR(ConfigError);

// No traveling wave of the requested kind exists.
GDP_DEFINE_ERROR(NoRoot);
GDP_DEFINE_ERROR(NoPeakon);

// Numerical failures.
GDP_DEFINE_ERROR(DomainError);
GDP_DEFINE_ERROR(SingularityError);
GDP_DEFINE_ERROR(QuadratureFailure);
GDP_DEFINE_ERROR(NonFinite);
GDP_DEFINE_ERROR(InsufficientTail);
GDP_DEFINE_ERROR(TrackingLost);

#undef GDP_DEFINE_ERROR

} // namespace gdp
