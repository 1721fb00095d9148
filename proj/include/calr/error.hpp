#pragma once

#include <stdexcept>
#include <string>

namespace calr {

// Failure categories surfaced to callers. Data-shape problems and numerical
// degeneracies are kept apart so the CLI can map them to distinct exit codes
// and the simulation harness can count degenerate replications per test.
enum class ErrorCode {
  EmptyData,
  NoEvents,
  ZeroVariance,
  NonpositiveVariance,
  RankDeficient,
  NoRoot,
  InvalidConfig,
  InvalidMarginVector,
  MissingColumn,
  NonNumeric,
  BadArmValue,
  BadEventValue,
  BadStratumValue,
  NegativeTime,
};

const char* error_code_name(ErrorCode code);

// True for malformed-input codes (CLI exit 2), false for numerical
// degeneracies (CLI exit 3).
bool is_data_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace calr
