#pragma once

#include <stdexcept>
#include <string>

namespace canht {

enum class ErrorCode {
    NoConeEigenvector,
    NotCommuting,
    ConeNotPreserved,
    RankDeficient,
    NotFoundWithinBound,
    BudgetExceeded,
    DimensionMismatch,
    EntropyCheckFailed,
    InfinityPoint,
    DigitBudgetExceeded,
    ExcludedPoint,
    InvalidInput,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NoConeEigenvector: return "NoConeEigenvector";
        case ErrorCode::NotCommuting: return "NotCommuting";
        case ErrorCode::ConeNotPreserved: return "ConeNotPreserved";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::NotFoundWithinBound: return "NotFoundWithinBound";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EntropyCheckFailed: return "EntropyCheckFailed";
        case ErrorCode::InfinityPoint: return "InfinityPoint";
        case ErrorCode::DigitBudgetExceeded: return "DigitBudgetExceeded";
        case ErrorCode::ExcludedPoint: return "ExcludedPoint";
        case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace canht
