#include "calr/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "calr/error.hpp"

namespace calr {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// One logical CSV record (quotes may hide commas but not newlines, which is
// all the canonical exports need).
std::vector<std::string> split_record(const std::string& line, int file_line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) {
    fail(ErrorCode::NonNumeric,
         "line " + std::to_string(file_line) + ": unterminated quote");
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& raw, int file_line,
                    const std::string& col) {
  const std::string s = trim(raw);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || s.empty() ||
      !std::isfinite(value)) {
    fail(ErrorCode::NonNumeric, "line " + std::to_string(file_line) +
                                    ", column '" + col + "': '" + raw +
                                    "' is not a finite number");
  }
  return value;
}

int find_column(const std::vector<std::string>& header,
                const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int require_column(const std::vector<std::string>& header,
                   const std::string& name) {
  const int idx = find_column(header, name);
  if (idx < 0) {
    fail(ErrorCode::MissingColumn, "column '" + name + "' not found");
  }
  return idx;
}

}  // namespace

TrialData parse_trial_csv_text(const std::string& text,
                               const CsvSchema& schema) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    if (!cur.empty()) lines.push_back(cur);
  }
  if (lines.empty()) fail(ErrorCode::EmptyData, "file has no header row");

  std::vector<std::string> header = split_record(lines[0], 1);
  for (auto& h : header) h = trim(h);

  const int col_time = require_column(header, schema.time);
  const int col_event = require_column(header, schema.event);
  const int col_arm = require_column(header, schema.arm);
  int col_stratum = -1;
  if (schema.stratum) {
    col_stratum = require_column(header, *schema.stratum);
  } else {
    col_stratum = find_column(header, "stratum");
  }
  std::vector<std::pair<std::string, int>> covariate_cols;
  if (schema.covariates) {
    for (const std::string& name : *schema.covariates) {
      covariate_cols.emplace_back(name, require_column(header, name));
    }
  } else {
    for (int j = 1;; ++j) {
      const std::string name = "x" + std::to_string(j);
      const int idx = find_column(header, name);
      if (idx < 0) break;
      covariate_cols.emplace_back(name, idx);
    }
  }

  TrialData data;
  data.p = static_cast<int>(covariate_cols.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const int file_line = static_cast<int>(li) + 1;
    if (trim(lines[li]).empty()) continue;
    const std::vector<std::string> fields = split_record(lines[li], file_line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::NonNumeric,
           "line " + std::to_string(file_line) + ": expected " +
               std::to_string(header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }
    const double time = parse_double(fields[col_time], file_line, schema.time);
    if (!(time >= 0.0)) {
      fail(ErrorCode::NegativeTime,
           "line " + std::to_string(file_line) + ": time " +
               fields[col_time] + " is negative");
    }
    const double event =
        parse_double(fields[col_event], file_line, schema.event);
    if (event != 0.0 && event != 1.0) {
      fail(ErrorCode::BadEventValue,
           "line " + std::to_string(file_line) + ": event must be 0 or 1");
    }
    const double arm = parse_double(fields[col_arm], file_line, schema.arm);
    if (arm != 0.0 && arm != 1.0) {
      fail(ErrorCode::BadArmValue,
           "line " + std::to_string(file_line) + ": arm must be 0 or 1");
    }
    int stratum = 0;
    if (col_stratum >= 0) {
      const double z = parse_double(fields[col_stratum], file_line,
                                    header[col_stratum]);
      if (z < 0.0 || z != std::floor(z) || z > 1e6) {
        fail(ErrorCode::BadStratumValue,
             "line " + std::to_string(file_line) +
                 ": stratum must be a small nonnegative integer");
      }
      stratum = static_cast<int>(z);
    }
    data.time.push_back(time);
    data.event.push_back(static_cast<std::uint8_t>(event));
    data.arm.push_back(static_cast<std::uint8_t>(arm));
    data.stratum.push_back(stratum);
    for (const auto& [name, idx] : covariate_cols) {
      data.x.push_back(parse_double(fields[idx], file_line, name));
    }
  }
  data.validate();
  return data;
}

TrialData parse_trial_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::EmptyData, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trial_csv_text(buf.str(), schema);
}

std::string trial_csv_text(const TrialData& data) {
  std::ostringstream out;
  out.precision(17);
  out << "time,event,arm,stratum";
  for (int j = 1; j <= data.p; ++j) out << ",x" << j;
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    out << data.time[i] << ',' << static_cast<int>(data.event[i]) << ','
        << static_cast<int>(data.arm[i]) << ',' << data.stratum[i];
    for (int j = 0; j < data.p; ++j) out << ',' << data.xat(i, j);
    out << '\n';
  }
  return out.str();
}

void write_trial_csv(const std::string& path, const TrialData& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::EmptyData, "cannot open '" + path + "' for write");
  out << trial_csv_text(data);
}

}  // namespace calr
