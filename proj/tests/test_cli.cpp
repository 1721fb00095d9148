#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifdef _WIN32
#error "the CLI suite drives the binary through /bin/sh"
#else
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string binary_path() {
  const char* bin = std::getenv("CALR_BIN");
  REQUIRE_MESSAGE(bin != nullptr,
                  "CALR_BIN must point at the built command line tool");
  return bin;
}

fs::path scratch_dir(const std::string& label) {
  const fs::path dir = fs::temp_directory_path() /
                       ("calr_cli_" + label + "_" + std::to_string(getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs `command` under the shell, capturing exit code and both streams.
RunResult run(const std::string& command, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string full =
      command + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(full.c_str());
  RunResult r;
  r.exit_code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_fixture(const fs::path& dir) {
  const fs::path path = dir / "two_subject.csv";
  std::ofstream(path) << "time,event,arm\n1,1,1\n2,0,0\n";
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze prints the table and writes the json report") {
  const fs::path dir = scratch_dir("analyze");
  const fs::path data = write_fixture(dir);
  const RunResult r = run("'" + binary_path() + "' analyze --data '" +
                              data.string() + "' --out '" + dir.string() + "'",
                          dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("1.0000") != std::string::npos);
  CHECK(r.out.find("0.3173") != std::string::npos);
  CHECK(r.out.find("T_CSL") != std::string::npos);

  const fs::path report = dir / "report.json";
  REQUIRE(fs::exists(report));
  const nlohmann::json doc = nlohmann::json::parse(slurp(report));
  CHECK(doc.at("schema_version").get<int>() == 1);
  CHECK(doc.at("dataset").at("n").get<int>() == 2);
  CHECK(doc.at("tests").at("T_L").at("statistic").get<double>() == 1.0);
  fs::remove_all(dir);
}

TEST_CASE("json output location follows flag, then environment") {
  const fs::path dir = scratch_dir("outdir");
  const fs::path data = write_fixture(dir);
  const fs::path by_env = dir / "by_env";
  const fs::path by_flag = dir / "by_flag";
  fs::create_directories(by_env);
  fs::create_directories(by_flag);
  const std::string base =
      "'" + binary_path() + "' analyze --data '" + data.string() + "'";

  RunResult r = run("CALR_OUT_DIR='" + by_env.string() + "' " + base, dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(by_env / "report.json"));

  r = run("CALR_OUT_DIR='" + by_env.string() + "' " + base + " --out '" +
              by_flag.string() + "'",
          dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(by_flag / "report.json"));

  r = run(base + " --out '" + dir.string() + "' --no-json", dir);
  CHECK(r.exit_code == 0);
  CHECK_FALSE(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}

TEST_CASE("exit codes distinguish usage, data, and analysis failures") {
  const fs::path dir = scratch_dir("exitcodes");
  const std::string bin = "'" + binary_path() + "'";

  CHECK(run(bin + " analyze", dir).exit_code == 1);           // missing --data
  CHECK(run(bin + " --bogus", dir).exit_code == 1);           // unknown flag
  CHECK(run(bin + " analyze --data /nonexistent.csv", dir).exit_code == 2);

  const fs::path bad = dir / "bad.csv";
  std::ofstream(bad) << "time,event,arm\n1,1,2\n";
  const RunResult r =
      run(bin + " analyze --data '" + bad.string() + "'", dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("BadArmValue") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("randomize is reproducible and balances complete blocks") {
  const fs::path dir = scratch_dir("randomize");
  const fs::path zfile = dir / "z.txt";
  std::ofstream(zfile) << "0\n0\n0\n0\n";
  const std::string cmd = "'" + binary_path() +
                          "' randomize --scheme permuted_block --block-size 4 "
                          "--pi 0.5 --seed 5 < '" +
                          zfile.string() + "'";
  const RunResult a = run(cmd, dir);
  const RunResult b = run(cmd, dir);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);

  int ones = 0, lines = 0;
  std::istringstream in(a.out);
  std::string line;
  while (std::getline(in, line)) {
    CHECK((line == "0" || line == "1"));
    ones += line == "1" ? 1 : 0;
    lines += 1;
  }
  CHECK(lines == 4);
  CHECK(ones == 2);

  CHECK(run("'" + binary_path() + "' randomize --scheme minimization < '" +
                zfile.string() + "'",
            dir)
            .exit_code == 2);  // minimization needs margin level counts
  fs::remove_all(dir);
}

TEST_CASE("simulate writes the rates table") {
  const fs::path dir = scratch_dir("simulate");
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"case": "I", "n": 40, "replications": 8,
                            "seed": 3, "threads": 1,
                            "scheme": {"kind": "simple"}})";
  const RunResult r = run("'" + binary_path() + "' simulate --config '" +
                              cfg.string() + "' --out '" + dir.string() + "'",
                          dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("T_CSL") != std::string::npos);

  const fs::path rates = dir / "rates.csv";
  REQUIRE(fs::exists(rates));
  std::istringstream in(slurp(rates));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "case,scheme,test,theta,reps,rejections,rate,mc_se,degenerate");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) rows += 1;
  }
  CHECK(rows == 4);

  CHECK(run("'" + binary_path() + "' simulate --config /nonexistent.json",
            dir)
            .exit_code == 2);
  fs::remove_all(dir);
}

}  // TEST_SUITE
