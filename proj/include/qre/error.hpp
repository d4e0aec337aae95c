#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qre {

enum class ErrorCode {
    ShapeMismatch,
    NonFinite,
    NotHermitian,
    NotPositiveDefinite,
    ImaginaryAxisEigenvalue,
    SingularU1,
    ResidualTooLarge,
    NotPhysicallyRealizable,
    DomainError,
    WrongTopology,
    ScalingTooLarge,
    SingularE2,
    CareFailure,
    CouplingSingular,
    UnstableEstimator,
    ChannelOutOfRange,
    SingularAtFrequency,
    UnstableSystem,
    ImaginaryAxisPole,
    ConfigError,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library surfaces as qre::Error; code() lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ImaginaryAxisEigenvalue: return "ImaginaryAxisEigenvalue";
    case ErrorCode::SingularU1: return "SingularU1";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::NotPhysicallyRealizable: return "NotPhysicallyRealizable";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::WrongTopology: return "WrongTopology";
    case ErrorCode::ScalingTooLarge: return "ScalingTooLarge";
    case ErrorCode::SingularE2: return "SingularE2";
    case ErrorCode::CareFailure: return "CareFailure";
    case ErrorCode::CouplingSingular: return "CouplingSingular";
    case ErrorCode::UnstableEstimator: return "UnstableEstimator";
    case ErrorCode::ChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorCode::SingularAtFrequency: return "SingularAtFrequency";
    case ErrorCode::UnstableSystem: return "UnstableSystem";
    case ErrorCode::ImaginaryAxisPole: return "ImaginaryAxisPole";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

} // namespace qre
