// Command-line front end: analyze a trial CSV, run Monte Carlo simulations
// from a JSON config, or drive the randomization schemes over stdin.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "calr/analyze.hpp"
#include "calr/config.hpp"
#include "calr/csv.hpp"
#include "calr/error.hpp"
#include "calr/random.hpp"
#include "calr/simulate.hpp"

namespace {

// Precedence: explicit --out flag, then CALR_OUT_DIR, then current directory.
std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CALR_OUT_DIR"); env && *env) return env;
  return ".";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(csv);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    calr::fail(calr::ErrorCode::InvalidConfig,
               "cannot write '" + path.string() + "'");
  }
  out << text;
}

struct AnalyzeArgs {
  std::string data;
  std::string time_col = "time";
  std::string event_col = "event";
  std::string arm_col = "arm";
  std::string stratum_col;
  std::string covariates;
  double pi = -1.0;
  double alpha = 0.05;
  bool subgroups = false;
  std::string out_dir;
  bool no_json = false;
};

int run_analyze(const AnalyzeArgs& args) {
  calr::CsvSchema schema;
  schema.time = args.time_col;
  schema.event = args.event_col;
  schema.arm = args.arm_col;
  if (!args.stratum_col.empty()) schema.stratum = args.stratum_col;
  if (!args.covariates.empty()) schema.covariates = split_list(args.covariates);
  const calr::TrialData data = calr::parse_trial_csv(args.data, schema);

  calr::AnalyzeOptions opts;
  if (args.pi >= 0.0) opts.pi = args.pi;
  opts.alpha = args.alpha;
  opts.subgroups = args.subgroups;
  const calr::AnalysisReport report = calr::analyze(data, opts);

  if (!args.no_json) {
    const std::filesystem::path dir = resolve_out_dir(args.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "report.json", calr::report_json(report) + "\n");
  }
  std::cout << calr::report_text(report);
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  std::optional<long> seed;
  std::optional<int> threads;
  std::optional<double> alpha;
  std::optional<long> replications;
};

int run_simulate(const SimulateArgs& args) {
  calr::SimulationJob job = calr::parse_simulation_config(args.config);
  if (args.seed) job.config.seed = static_cast<std::uint64_t>(*args.seed);
  if (args.threads) job.config.threads = *args.threads;
  if (args.alpha) job.config.alpha = *args.alpha;
  if (args.replications) job.config.replications = *args.replications;

  std::vector<calr::MonteCarloRow> rows;
  double seconds = 0.0;
  if (!job.theta_grid.empty()) {
    rows = calr::run_power_curve(job.config, job.theta_grid);
  } else {
    calr::MonteCarloReport report = calr::run_rates(job.config);
    rows = std::move(report.rows);
    seconds = report.seconds;
  }

  const std::filesystem::path dir = resolve_out_dir(args.out_dir);
  std::filesystem::create_directories(dir);
  const std::filesystem::path csv_path = dir / "rates.csv";
  write_file(csv_path, calr::report_csv(rows));

  std::cout << "wrote " << csv_path.string() << " (" << rows.size()
            << " rows)";
  if (seconds > 0.0) std::cout << " in " << seconds << " s";
  std::cout << '\n';
  for (const calr::MonteCarloRow& row : rows) {
    std::cout << row.scase << ' ' << row.scheme << ' ' << row.test
              << " theta=" << row.theta << " rate=" << row.rate
              << " (se " << row.mc_se << ", degenerate " << row.degenerate
              << ")\n";
  }
  return 0;
}

struct RandomizeArgs {
  std::string scheme = "simple";
  double pi = 0.5;
  int block_size = 4;
  double p_prefer = 0.8;
  std::string margins;
  long seed = 0;
};

int run_randomize(const RandomizeArgs& args) {
  calr::SchemeConfig config;
  if (args.scheme == "simple") {
    config.kind = calr::SchemeKind::simple;
  } else if (args.scheme == "permuted_block") {
    config.kind = calr::SchemeKind::permuted_block;
  } else if (args.scheme == "minimization") {
    config.kind = calr::SchemeKind::minimization;
  } else {
    calr::fail(calr::ErrorCode::InvalidConfig,
               "unknown scheme '" + args.scheme + "'");
  }
  config.pi = args.pi;
  config.block_size = args.block_size;
  config.p_prefer = args.p_prefer;
  for (const std::string& item : split_list(args.margins)) {
    try {
      std::size_t used = 0;
      const int levels = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      config.margin_levels.push_back(levels);
    } catch (const std::exception&) {
      calr::fail(calr::ErrorCode::InvalidConfig,
                 "--margins entry '" + item + "' is not an integer");
    }
  }
  config.validate();

  calr::Randomizer randomizer(config, static_cast<std::uint64_t>(args.seed));
  std::string line;
  while (std::getline(std::cin, line)) {
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::vector<int> z;
    std::istringstream in(line);
    int v = 0;
    while (in >> v) z.push_back(v);
    std::cout << randomizer.assign_next(z) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariate-adjusted log-rank analysis toolkit"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Run the four tests and estimators on a trial CSV");
  analyze->add_option("--data", an.data, "input CSV file")->required();
  analyze->add_option("--time-col", an.time_col, "time column name");
  analyze->add_option("--event-col", an.event_col, "event column name");
  analyze->add_option("--arm-col", an.arm_col, "arm column name");
  analyze->add_option("--stratum-col", an.stratum_col, "stratum column name");
  analyze->add_option("--covariates", an.covariates,
                      "comma-separated covariate column names");
  analyze->add_option("--pi", an.pi, "design allocation probability")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--alpha", an.alpha, "two-sided level");
  analyze->add_flag("--subgroups", an.subgroups,
                    "re-run unstratified analyses per stratum");
  analyze->add_option("--out", an.out_dir, "output directory for report.json");
  analyze->add_flag("--no-json", an.no_json, "skip the JSON report file");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo rejection rates from a JSON config");
  simulate->add_option("--config", sim.config, "JSON config file")->required();
  simulate->add_option("--out", sim.out_dir, "output directory for rates.csv");
  simulate->add_option("--seed", sim.seed, "override config seed");
  simulate->add_option("--threads", sim.threads, "override config threads");
  simulate->add_option("--alpha", sim.alpha, "override config alpha");
  simulate->add_option("--replications", sim.replications,
                       "override config replications");

  RandomizeArgs rnd;
  CLI::App* randomize = app.add_subcommand(
      "randomize", "Assign arms for stdin z-vectors, one per line");
  randomize->add_option("--scheme", rnd.scheme,
                        "simple | permuted_block | minimization");
  randomize->add_option("--pi", rnd.pi, "target allocation P(arm=1)");
  randomize->add_option("--block-size", rnd.block_size,
                        "permuted block length");
  randomize->add_option("--p-prefer", rnd.p_prefer,
                        "minimization preference probability");
  randomize->add_option("--margins", rnd.margins,
                        "comma-separated level counts per margin");
  randomize->add_option("--seed", rnd.seed, "randomization stream seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) return run_analyze(an);
    if (simulate->parsed()) return run_simulate(sim);
    if (randomize->parsed()) return run_randomize(rnd);
  } catch (const calr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return calr::is_data_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
