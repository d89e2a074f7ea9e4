#include "aninorm/error.hpp"

namespace aninorm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidTimeScale: return "InvalidTimeScale";
    case ErrorCode::SpectralRadius: return "SpectralRadius";
    case ErrorCode::SpectralAbscissa: return "SpectralAbscissa";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::NotSchur: return "NotSchur";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::ResolventSingular: return "ResolventSingular";
    case ErrorCode::PoleAtMinusOne: return "PoleAtMinusOne";
    case ErrorCode::NotStrictlyProper: return "NotStrictlyProper";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Bracket: return "BracketError";
    case ErrorCode::MaxIter: return "MaxIterError";
    case ErrorCode::InadmissibleQ: return "InadmissibleQ";
    case ErrorCode::NonroundRequired: return "NonroundRequired";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::UnstableSystem: return "UnstableSystem";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::Inconsistent: return "Inconsistent";
  }
  return "Unknown";
}

}  // namespace aninorm
