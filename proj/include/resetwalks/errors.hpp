#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resetwalks {

enum class ErrorCode {
    NonStochastic,
    DegenerateReset,
    EmptySupport,
    ResourceLimit,
    NormalizationFailed,
    BranchPointProximity,
    DegenerateRoots,
    KernelZero,
    ClassificationFailed,
    ResidualTooLarge,
    InvalidArgument,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonStochastic: return "NonStochastic";
    case ErrorCode::DegenerateReset: return "DegenerateReset";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::NormalizationFailed: return "NormalizationFailed";
    case ErrorCode::BranchPointProximity: return "BranchPointProximity";
    case ErrorCode::DegenerateRoots: return "DegenerateRoots";
    case ErrorCode::KernelZero: return "KernelZero";
    case ErrorCode::ClassificationFailed: return "ClassificationFailed";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define RESETWALKS_REQUIRE(cond, code, msg)                  \
    do {                                                     \
        if (!(cond)) throw ::resetwalks::Error((code), (msg)); \
    } while (0)

} // namespace resetwalks
