#include "secbeam/common.hpp"

namespace secbeam {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNotHermitian: return "not-hermitian";
    case ErrorCode::kRankDeficient: return "rank-deficient";
    case ErrorCode::kExtractionFailure: return "extraction-failure";
    case ErrorCode::kInitializationFailure: return "initialization-failure";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kInvalidConfig: return "invalid-config";
  }
  return "unknown";
}

}  // namespace secbeam
