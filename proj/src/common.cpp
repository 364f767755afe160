#include "cqed/common.hpp"

namespace cqed {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::NoMinimum: return "NoMinimum";
    case ErrorKind::NotDispersive: return "NotDispersive";
    case ErrorKind::OffResonance: return "OffResonance";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::MarkovViolation: return "MarkovViolation";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::NormUnderflow: return "NormUnderflow";
    case ErrorKind::EigFailure: return "EigFailure";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace cqed
