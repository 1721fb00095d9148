#pragma once

#include <string>
#include <vector>

#include "calr/simulate.hpp"

namespace calr {

// A simulation request: one scenario plus an optional theta grid. With a
// nonempty grid the run sweeps theta with common random numbers; otherwise a
// single batch runs at config.theta.
struct SimulationJob {
  ScenarioConfig config;
  std::vector<double> theta_grid;
};

// Parses the JSON configuration document. Every field is optional and
// defaults to the ScenarioConfig initializers. Unknown keys are rejected.
//
// {
//   "case": "I" | "II" | "III" | "IV" | "CRViolation",
//   "theta": 0.0, "theta_grid": [0.0, 0.2],
//   "psi": 0.0,
//   "n": 500, "replications": 10000, "seed": 20240501,
//   "alpha": 0.05, "pi": 0.5, "threads": 0,
//   "z_cuts": {"w1": [0.0], "w2": [-0.4307, 0.4307]},
//   "scheme": {"kind": "simple" | "permuted_block" | "minimization",
//              "pi": 0.5, "block_size": 4, "p_prefer": 0.8,
//              "margin_levels": [2, 3]}
// }
SimulationJob parse_simulation_config_text(const std::string& text);
SimulationJob parse_simulation_config(const std::string& path);

}  // namespace calr
