#include "calr/error.hpp"

namespace calr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::NoEvents: return "NoEvents";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NonpositiveVariance: return "NonpositiveVariance";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidMarginVector: return "InvalidMarginVector";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::BadArmValue: return "BadArmValue";
    case ErrorCode::BadEventValue: return "BadEventValue";
    case ErrorCode::BadStratumValue: return "BadStratumValue";
    case ErrorCode::NegativeTime: return "NegativeTime";
  }
  return "Unknown";
}

bool is_data_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyData:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidMarginVector:
    case ErrorCode::MissingColumn:
    case ErrorCode::NonNumeric:
    case ErrorCode::BadArmValue:
    case ErrorCode::BadEventValue:
    case ErrorCode::BadStratumValue:
    case ErrorCode::NegativeTime:
      return true;
    default:
      return false;
  }
}

}  // namespace calr
