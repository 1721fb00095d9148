#include "calr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "calr/error.hpp"

namespace calr {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  fail(ErrorCode::InvalidConfig, msg);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      bad("unknown key '" + item.key() + "' in " + where);
    }
  }
}

double get_number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad("'" + key + "' must be a number");
  return v.get<double>();
}

long get_integer(const json& obj, const std::string& key, long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad("'" + key + "' must be an integer");
  return v.get<long>();
}

std::vector<double> get_number_list(const json& v, const std::string& key) {
  if (!v.is_array()) bad("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& item : v) {
    if (!item.is_number()) bad("'" + key + "' must be an array of numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "simple") return SchemeKind::simple;
  if (name == "permuted_block") return SchemeKind::permuted_block;
  if (name == "minimization") return SchemeKind::minimization;
  bad("unknown scheme kind '" + name + "'");
}

}  // namespace

SimulationJob parse_simulation_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"case", "theta", "theta_grid", "psi", "n", "replications",
              "seed", "alpha", "pi", "threads", "z_cuts", "scheme"});

  SimulationJob job;
  ScenarioConfig& c = job.config;
  if (doc.contains("case")) {
    if (!doc.at("case").is_string()) bad("'case' must be a string");
    c.scase = scenario_from_name(doc.at("case").get<std::string>());
  }
  c.theta = get_number(doc, "theta", c.theta);
  c.psi = get_number(doc, "psi", c.psi);
  c.n = static_cast<int>(get_integer(doc, "n", c.n));
  c.replications = get_integer(doc, "replications", c.replications);
  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      bad("'seed' must be a nonnegative integer");
    }
    c.seed = v.get<std::uint64_t>();
  }
  c.alpha = get_number(doc, "alpha", c.alpha);
  c.pi = get_number(doc, "pi", c.pi);
  c.threads = static_cast<int>(get_integer(doc, "threads", c.threads));
  if (doc.contains("z_cuts")) {
    const json& z = doc.at("z_cuts");
    check_keys(z, "z_cuts", {"w1", "w2"});
    if (z.contains("w1")) c.z_cuts.w1 = get_number_list(z.at("w1"), "w1");
    if (z.contains("w2")) c.z_cuts.w2 = get_number_list(z.at("w2"), "w2");
  }
  c.scheme.pi = c.pi;
  if (doc.contains("scheme")) {
    const json& s = doc.at("scheme");
    check_keys(s, "scheme",
               {"kind", "pi", "block_size", "p_prefer", "margin_levels"});
    if (s.contains("kind")) {
      if (!s.at("kind").is_string()) bad("'kind' must be a string");
      c.scheme.kind = scheme_from_name(s.at("kind").get<std::string>());
    }
    c.scheme.pi = get_number(s, "pi", c.scheme.pi);
    c.scheme.block_size =
        static_cast<int>(get_integer(s, "block_size", c.scheme.block_size));
    c.scheme.p_prefer = get_number(s, "p_prefer", c.scheme.p_prefer);
    if (s.contains("margin_levels")) {
      const json& m = s.at("margin_levels");
      if (!m.is_array()) bad("'margin_levels' must be an array of integers");
      c.scheme.margin_levels.clear();
      for (const json& item : m) {
        if (!item.is_number_integer()) {
          bad("'margin_levels' must be an array of integers");
        }
        c.scheme.margin_levels.push_back(item.get<int>());
      }
    }
  }
  if (doc.contains("theta_grid")) {
    job.theta_grid = get_number_list(doc.at("theta_grid"), "theta_grid");
    if (job.theta_grid.empty()) bad("'theta_grid' must not be empty");
  }
  c.validate();
  return job;
}

SimulationJob parse_simulation_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_simulation_config_text(buf.str());
}

}  // namespace calr
