#pragma once

#include <optional>
#include <string>
#include <vector>

#include "calr/types.hpp"

namespace calr {

// Column mapping for trial CSV files. Defaults match the canonical schema
// (time, event, arm, optional stratum, covariates x1..xp). Explicitly named
// columns must exist; the optional ones are picked up when present.
struct CsvSchema {
  std::string time = "time";
  std::string event = "event";
  std::string arm = "arm";
  std::optional<std::string> stratum;               // default: "stratum" if present
  std::optional<std::vector<std::string>> covariates;  // default: x1, x2, ...
};

// Strict RFC-4180-style reader: header row, comma separated, double quotes
// for embedded commas/quotes, '.' decimal point. Error messages carry the
// 1-based file line of the offending cell.
TrialData parse_trial_csv(const std::string& path, const CsvSchema& schema = {});
TrialData parse_trial_csv_text(const std::string& text,
                               const CsvSchema& schema = {});

// Writes the canonical schema (time,event,arm,stratum,x1..xp).
std::string trial_csv_text(const TrialData& data);
void write_trial_csv(const std::string& path, const TrialData& data);

}  // namespace calr
