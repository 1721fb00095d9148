#include "calr/analyze.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "calr/adjust.hpp"
#include "calr/error.hpp"
#include "calr/survival.hpp"

namespace calr {

namespace {

template <class F>
auto run_cell(F&& f) -> Cell<decltype(f())> {
  Cell<decltype(f())> cell;
  try {
    cell.value = f();
  } catch (const Error& e) {
    cell.error = e.what();
  }
  return cell;
}

template <class T>
Cell<T> unavailable(const std::string& why) {
  Cell<T> cell;
  cell.error = why;
  return cell;
}

TrialData subset_by_stratum(const TrialData& data, int stratum) {
  TrialData out;
  out.p = data.p;
  for (int i = 0; i < data.n(); ++i) {
    if (data.stratum[i] != stratum) continue;
    out.time.push_back(data.time[i]);
    out.event.push_back(data.event[i]);
    out.arm.push_back(data.arm[i]);
    out.stratum.push_back(data.stratum[i]);
    for (int j = 0; j < data.p; ++j) out.x.push_back(data.xat(i, j));
  }
  return out;
}

nlohmann::json test_json(const Cell<TestResult>& cell) {
  if (!cell.ok()) return {{"error", cell.error}};
  const TestResult& t = *cell.value;
  return {{"numerator", t.numerator},
          {"se", t.se},
          {"statistic", t.statistic},
          {"p", t.p_value}};
}

nlohmann::json estimate_json(const Cell<HazardEstimate>& cell) {
  if (!cell.ok()) return {{"error", cell.error}};
  const HazardEstimate& e = *cell.value;
  return {{"theta", e.theta},
          {"se", e.se},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},
          {"conf_level", e.conf_level}};
}

void test_row(std::ostringstream& out, const std::string& name,
              const Cell<TestResult>& cell) {
  out << "  " << std::left << std::setw(7) << name;
  if (cell.ok()) {
    const TestResult& t = *cell.value;
    out << std::right << std::fixed << std::setprecision(4) << std::setw(12)
        << t.numerator << std::setw(10) << t.se << std::setw(12) << t.statistic
        << std::setw(12) << t.p_value;
  } else {
    out << "  " << cell.error;
  }
  out << '\n';
}

void estimate_row(std::ostringstream& out, const std::string& name,
                  const Cell<HazardEstimate>& cell) {
  out << "  " << std::left << std::setw(7) << name;
  if (cell.ok()) {
    const HazardEstimate& e = *cell.value;
    out << std::right << std::fixed << std::setprecision(4) << std::setw(12)
        << e.theta << std::setw(10) << e.se << "   [" << e.ci_low << ", "
        << e.ci_high << "]";
  } else {
    out << "  " << cell.error;
  }
  out << '\n';
}

}  // namespace

AnalysisReport analyze(const TrialData& data, const AnalyzeOptions& opts) {
  data.validate();
  if (opts.pi && !(*opts.pi > 0.0 && *opts.pi < 1.0)) {
    fail(ErrorCode::InvalidConfig, "pi must lie in (0, 1)");
  }
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
    fail(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  }

  AnalysisReport report;
  report.n = data.n();
  report.n_arm1 = 0;
  for (int i = 0; i < data.n(); ++i) report.n_arm1 += data.arm[i];
  report.p = data.p;
  {
    std::map<int, int> counts;
    for (int z : data.stratum) ++counts[z];
    report.strata_counts.assign(counts.begin(), counts.end());
  }
  report.pi_used =
      opts.pi ? *opts.pi : static_cast<double>(report.n_arm1) / report.n;
  report.alpha = opts.alpha;

  const bool multi_strata = report.strata_counts.size() > 1;
  const AdjustOptions adj_cl{opts.pi, multi_strata};
  const AdjustOptions adj_csl{opts.pi, false};
  SolveOptions solve;
  solve.pi = opts.pi;
  solve.conf_level = 1.0 - opts.alpha;
  SolveOptions solve_cl = solve;
  solve_cl.stratum_dummies = multi_strata;

  report.t_l = run_cell([&] { return logrank_test(data); });
  report.t_sl = run_cell([&] { return stratified_logrank_test(data); });
  report.theta_l = run_cell([&] { return solve_theta_unadjusted(data, solve); });
  report.theta_sl =
      run_cell([&] { return solve_theta_stratified(data, solve); });
  if (data.p > 0) {
    report.t_cl = run_cell([&] { return adjusted_logrank(data, adj_cl); });
    report.t_csl =
        run_cell([&] { return adjusted_stratified_logrank(data, adj_csl); });
    report.theta_cl =
        run_cell([&] { return solve_theta_adjusted(data, solve_cl); });
    report.theta_csl = run_cell(
        [&] { return solve_theta_adjusted_stratified(data, solve); });
  } else {
    const std::string why = "no covariate columns";
    report.t_cl = unavailable<TestResult>(why);
    report.t_csl = unavailable<TestResult>(why);
    report.theta_cl = unavailable<HazardEstimate>(why);
    report.theta_csl = unavailable<HazardEstimate>(why);
  }

  if (opts.subgroups) {
    const int m = static_cast<int>(report.strata_counts.size());
    for (const auto& [label, count] : report.strata_counts) {
      const TrialData sub = subset_by_stratum(data, label);
      SubgroupReport sg;
      sg.stratum = label;
      sg.n = count;
      sg.t_l = run_cell([&] { return logrank_test(sub); });
      sg.theta_l =
          run_cell([&] { return solve_theta_unadjusted(sub, solve); });
      if (data.p > 0) {
        sg.t_cl =
            run_cell([&] { return adjusted_logrank(sub, adj_csl); });
        sg.theta_cl =
            run_cell([&] { return solve_theta_adjusted(sub, solve); });
      } else {
        sg.t_cl = unavailable<TestResult>("no covariate columns");
        sg.theta_cl = unavailable<HazardEstimate>("no covariate columns");
      }
      if (sg.t_l.ok()) {
        sg.p_adj_l = std::min(1.0, m * sg.t_l.value->p_value);
      }
      if (sg.t_cl.ok()) {
        sg.p_adj_cl = std::min(1.0, m * sg.t_cl.value->p_value);
      }
      report.subgroups.push_back(std::move(sg));
    }
  }
  return report;
}

std::string report_json(const AnalysisReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["dataset"] = {{"n", report.n},
                    {"n_arm1", report.n_arm1},
                    {"covariates", report.p}};
  nlohmann::json strata = nlohmann::json::array();
  for (const auto& [label, count] : report.strata_counts) {
    strata.push_back({{"stratum", label}, {"n", count}});
  }
  doc["dataset"]["strata"] = strata;
  doc["options"] = {{"pi", report.pi_used}, {"alpha", report.alpha}};
  doc["tests"] = {{"T_L", test_json(report.t_l)},
                  {"T_CL", test_json(report.t_cl)},
                  {"T_SL", test_json(report.t_sl)},
                  {"T_CSL", test_json(report.t_csl)}};
  doc["estimates"] = {{"theta_L", estimate_json(report.theta_l)},
                      {"theta_CL", estimate_json(report.theta_cl)},
                      {"theta_SL", estimate_json(report.theta_sl)},
                      {"theta_CSL", estimate_json(report.theta_csl)}};
  if (!report.subgroups.empty()) {
    nlohmann::json subs = nlohmann::json::array();
    for (const SubgroupReport& sg : report.subgroups) {
      nlohmann::json entry = {{"stratum", sg.stratum}, {"n", sg.n}};
      entry["tests"] = {{"T_L", test_json(sg.t_l)},
                        {"T_CL", test_json(sg.t_cl)}};
      if (sg.t_l.ok()) entry["tests"]["T_L"]["p_adjusted"] = sg.p_adj_l;
      if (sg.t_cl.ok()) entry["tests"]["T_CL"]["p_adjusted"] = sg.p_adj_cl;
      entry["estimates"] = {{"theta_L", estimate_json(sg.theta_l)},
                            {"theta_CL", estimate_json(sg.theta_cl)}};
      subs.push_back(std::move(entry));
    }
    doc["subgroups"] = subs;
  }
  return doc.dump(2);
}

std::string report_text(const AnalysisReport& report) {
  std::ostringstream out;
  out << "subjects: " << report.n << "  (arm 1: " << report.n_arm1
      << ", arm 0: " << (report.n - report.n_arm1) << ")\n";
  out << "covariates: " << report.p << "  strata:";
  for (const auto& [label, count] : report.strata_counts) {
    out << "  " << label << ":" << count;
  }
  out << "\npi: " << std::fixed << std::setprecision(4) << report.pi_used
      << "  alpha: " << report.alpha << "\n\n";

  out << "  test      numerator        se   statistic     p-value\n";
  test_row(out, "T_L", report.t_l);
  test_row(out, "T_CL", report.t_cl);
  test_row(out, "T_SL", report.t_sl);
  test_row(out, "T_CSL", report.t_csl);
  out << "\n  log hazard ratio\n";
  estimate_row(out, "L", report.theta_l);
  estimate_row(out, "CL", report.theta_cl);
  estimate_row(out, "SL", report.theta_sl);
  estimate_row(out, "CSL", report.theta_csl);

  if (!report.subgroups.empty()) {
    const int m = static_cast<int>(report.subgroups.size());
    out << "\nsubgroups (Bonferroni m = " << m << ")\n";
    for (const SubgroupReport& sg : report.subgroups) {
      out << "stratum " << sg.stratum << " (n = " << sg.n << ")\n";
      out << "  test      numerator        se   statistic     p-value\n";
      test_row(out, "T_L", sg.t_l);
      test_row(out, "T_CL", sg.t_cl);
      if (sg.t_l.ok() || sg.t_cl.ok()) {
        out << "  adjusted p:";
        if (sg.t_l.ok()) {
          out << " T_L " << std::fixed << std::setprecision(4) << sg.p_adj_l;
        }
        if (sg.t_cl.ok()) {
          out << "  T_CL " << std::fixed << std::setprecision(4)
              << sg.p_adj_cl;
        }
        out << '\n';
      }
      out << "  log hazard ratio\n";
      estimate_row(out, "L", sg.theta_l);
      estimate_row(out, "CL", sg.theta_cl);
    }
  }
  return out.str();
}

}  // namespace calr
