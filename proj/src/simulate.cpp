#include "calr/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "calr/adjust.hpp"
#include "calr/error.hpp"
#include "calr/survival.hpp"

namespace calr {

namespace {

constexpr std::uint64_t kPurposeData = 1;
constexpr std::uint64_t kPurposeAssign = 2;

int level_of(double w, const std::vector<double>& cuts) {
  int level = 0;
  for (double c : cuts) {
    if (w >= c) ++level;
  }
  return level;
}

}  // namespace

const char* scenario_name(ScenarioCase c) {
  switch (c) {
    case ScenarioCase::case_i: return "I";
    case ScenarioCase::case_ii: return "II";
    case ScenarioCase::case_iii: return "III";
    case ScenarioCase::case_iv: return "IV";
    case ScenarioCase::cr_violation: return "CRViolation";
  }
  return "?";
}

ScenarioCase scenario_from_name(const std::string& name) {
  if (name == "I") return ScenarioCase::case_i;
  if (name == "II") return ScenarioCase::case_ii;
  if (name == "III") return ScenarioCase::case_iii;
  if (name == "IV") return ScenarioCase::case_iv;
  if (name == "CRViolation") return ScenarioCase::cr_violation;
  fail(ErrorCode::InvalidConfig, "unknown case '" + name + "'");
}

void ScenarioConfig::validate() const {
  if (n < 2) fail(ErrorCode::InvalidConfig, "n must be at least 2");
  if (replications < 1) {
    fail(ErrorCode::InvalidConfig, "replications must be at least 1");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(ErrorCode::InvalidConfig, "alpha must lie in (0, 1]");
  }
  if (!(pi > 0.0 && pi < 1.0)) {
    fail(ErrorCode::InvalidConfig, "pi must lie in (0, 1)");
  }
  if (threads < 0) fail(ErrorCode::InvalidConfig, "threads must be >= 0");
  for (const auto* cuts : {&z_cuts.w1, &z_cuts.w2}) {
    for (std::size_t i = 1; i < cuts->size(); ++i) {
      if (!((*cuts)[i] > (*cuts)[i - 1])) {
        fail(ErrorCode::InvalidConfig, "z cut points must increase strictly");
      }
    }
  }
  SchemeConfig scheme_check = scheme;
  if (scheme.kind == SchemeKind::minimization &&
      scheme.margin_levels.empty()) {
    scheme_check.margin_levels = {static_cast<int>(z_cuts.w1.size()) + 1,
                                  static_cast<int>(z_cuts.w2.size()) + 1};
  }
  scheme_check.validate();
}

TrialData generate_trial(const ScenarioConfig& config, long replication) {
  config.validate();
  const int n = config.n;
  Rng data_rng(derive_stream(config.seed, replication, kPurposeData));

  std::vector<double> w1(n), w2(n), w3(n), ue(n), uc(n);
  for (int i = 0; i < n; ++i) {
    w1[i] = data_rng.next_normal();
    w2[i] = data_rng.next_normal();
    w3[i] = data_rng.next_normal();
    ue[i] = data_rng.next_unit();
    uc[i] = data_rng.next_unit();
  }

  const int levels2 = static_cast<int>(config.z_cuts.w2.size()) + 1;
  SchemeConfig scheme = config.scheme;
  if (scheme.kind == SchemeKind::minimization && scheme.margin_levels.empty()) {
    scheme.margin_levels = {static_cast<int>(config.z_cuts.w1.size()) + 1,
                            levels2};
  }
  Randomizer randomizer(scheme,
                        derive_stream(config.seed, replication, kPurposeAssign));

  TrialData d;
  d.time.resize(n);
  d.event.resize(n);
  d.arm.resize(n);
  d.stratum.resize(n);
  d.p = 1;
  d.x.resize(n);

  std::vector<int> zrow;
  for (int i = 0; i < n; ++i) {
    const int z1 = level_of(w1[i], config.z_cuts.w1);
    const int z2 = level_of(w2[i], config.z_cuts.w2);
    const int joint = z1 * levels2 + z2;
    switch (scheme.kind) {
      case SchemeKind::simple: zrow.clear(); break;
      case SchemeKind::permuted_block: zrow = {joint}; break;
      case SchemeKind::minimization: zrow = {z1, z2}; break;
    }
    const int arm = randomizer.assign_next(zrow);

    const double eta = 0.5 * (w1[i] + w2[i] + w3[i]);
    const double e_event = -std::log1p(-ue[i]);  // unit exponential
    double t = 0.0, c = 0.0;
    switch (config.scase) {
      case ScenarioCase::case_i:
        t = e_event / (std::log(2.0) * std::exp(-config.theta * arm + eta));
        c = 10.0 + 30.0 * uc[i];
        break;
      case ScenarioCase::case_ii:
        t = e_event / (std::log(2.0) * std::exp(-config.theta * arm + eta));
        c = (3.0 - 3.0 * arm) - std::log1p(-uc[i]);
        break;
      case ScenarioCase::case_iii:
        t = std::exp(-config.theta * arm + eta) + e_event;
        c = 10.0 + 30.0 * uc[i];
        break;
      case ScenarioCase::case_iv:
        t = std::exp(-config.theta * arm + eta) + e_event;
        c = (3.0 - 3.0 * arm) - std::log1p(-uc[i]);
        break;
      case ScenarioCase::cr_violation: {
        t = std::exp(-config.theta * arm + eta) + e_event;
        const double crate =
            std::log(1.1) *
            std::exp(-config.psi * arm + 0.2 * (w1[i] + w2[i] + w3[i]));
        c = -std::log1p(-uc[i]) / crate;
        break;
      }
    }
    d.time[i] = std::min(t, c);
    d.event[i] = t <= c ? 1 : 0;
    d.arm[i] = static_cast<std::uint8_t>(arm);
    d.stratum[i] = joint;
    d.x[i] = w3[i];
  }
  return d;
}

namespace {

struct Tally {
  long rejections[4] = {0, 0, 0, 0};
  long degenerate[4] = {0, 0, 0, 0};
};

const char* kTestNames[4] = {"T_L", "T_CL", "T_SL", "T_CSL"};

void run_replication(const ScenarioConfig& config, long rep, Tally& tally) {
  const TrialData data = generate_trial(config, rep);
  const AdjustOptions cl{config.pi, true};
  const AdjustOptions csl{config.pi, false};
  for (int t = 0; t < 4; ++t) {
    try {
      TestResult r;
      switch (t) {
        case 0: r = logrank_test(data); break;
        case 1: r = adjusted_logrank(data, cl); break;
        case 2: r = stratified_logrank_test(data); break;
        case 3: r = adjusted_stratified_logrank(data, csl); break;
      }
      if (r.p_value < config.alpha) tally.rejections[t] += 1;
    } catch (const Error&) {
      tally.degenerate[t] += 1;
    }
  }
}

}  // namespace

MonteCarloReport run_rates(const ScenarioConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const long reps = config.replications;
  unsigned workers =
      config.threads > 0
          ? static_cast<unsigned>(config.threads)
          : std::max(1u, std::thread::hardware_concurrency());
  if (workers > static_cast<unsigned long>(reps)) {
    workers = static_cast<unsigned>(reps);
  }

  Tally total;
  std::atomic<long> next{0};
  std::mutex merge_mutex;
  std::exception_ptr worker_error;

  auto work = [&]() {
    Tally local;
    try {
      for (;;) {
        const long rep = next.fetch_add(1, std::memory_order_relaxed);
        if (rep >= reps) break;
        run_replication(config, rep, local);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(merge_mutex);
      if (!worker_error) worker_error = std::current_exception();
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (int t = 0; t < 4; ++t) {
      total.rejections[t] += local.rejections[t];
      total.degenerate[t] += local.degenerate[t];
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (worker_error) std::rethrow_exception(worker_error);

  MonteCarloReport report;
  report.config = config;
  for (int t = 0; t < 4; ++t) {
    MonteCarloRow row;
    row.scase = scenario_name(config.scase);
    row.scheme = scheme_name(config.scheme.kind);
    row.test = kTestNames[t];
    row.theta = config.theta;
    row.reps = reps;
    row.rejections = total.rejections[t];
    row.degenerate = total.degenerate[t];
    const long valid = reps - row.degenerate;
    row.rate = valid > 0 ? static_cast<double>(row.rejections) / valid : 0.0;
    row.mc_se = valid > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / valid) : 0.0;
    report.rows.push_back(row);
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

MonteCarloReport run_type1(const ScenarioConfig& config) {
  if (config.theta != 0.0) {
    fail(ErrorCode::InvalidConfig, "type-I runs require theta == 0");
  }
  return run_rates(config);
}

std::vector<MonteCarloRow> run_power_curve(const ScenarioConfig& config,
                                           const std::vector<double>& thetas) {
  if (thetas.empty()) {
    fail(ErrorCode::InvalidConfig, "theta grid must be nonempty");
  }
  std::vector<MonteCarloRow> rows;
  for (double theta : thetas) {
    ScenarioConfig point = config;
    point.theta = theta;
    const MonteCarloReport r = run_rates(point);
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
  }
  return rows;
}

std::string report_csv(const std::vector<MonteCarloRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "case,scheme,test,theta,reps,rejections,rate,mc_se,degenerate\n";
  for (const MonteCarloRow& r : rows) {
    out << r.scase << ',' << r.scheme << ',' << r.test << ',' << r.theta << ','
        << r.reps << ',' << r.rejections << ',' << r.rate << ',' << r.mc_se
        << ',' << r.degenerate << '\n';
  }
  return out.str();
}

}  // namespace calr
