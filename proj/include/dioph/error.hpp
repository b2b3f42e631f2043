#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

enum class ErrorKind {
    InvalidInput,
    NotTotallyReal,
    Reducible,
    IntegralBasisRequired,
    InvalidBasis,
    PrecisionExhausted,
    BoxTooLarge,
    SingularBlock,
    NumericalBreakdown,
    Overflow,
    GradeOutOfRange,
    NoSolutionInBox,
    BudgetExceeded,
    EtaZero,
    StageStuck,
    NotPrimitive,
    Unsupported,
    VerificationFailure,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::NotTotallyReal: return "NotTotallyReal";
        case ErrorKind::Reducible: return "Reducible";
        case ErrorKind::IntegralBasisRequired: return "IntegralBasisRequired";
        case ErrorKind::InvalidBasis: return "InvalidBasis";
        case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorKind::BoxTooLarge: return "BoxTooLarge";
        case ErrorKind::SingularBlock: return "SingularBlock";
        case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::GradeOutOfRange: return "GradeOutOfRange";
        case ErrorKind::NoSolutionInBox: return "NoSolutionInBox";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::EtaZero: return "EtaZero";
        case ErrorKind::StageStuck: return "StageStuck";
        case ErrorKind::NotPrimitive: return "NotPrimitive";
        case ErrorKind::Unsupported: return "Unsupported";
        case ErrorKind::VerificationFailure: return "VerificationFailure";
    }
    return "Unknown";
}

/// Every library failure is reported as a dioph::Error carrying a kind that
/// callers (and the CLI exit-code mapping) can switch on.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace dioph
