#pragma once

#include <functional>
#include <string>
#include <vector>

namespace radsim {

// One tunable scalar addressed by a config path such as "material.wall.A",
// "noise.ambient.amplitude" or "trace.f_rx".
struct ParamEntry {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  double initial = 0.5;
};

struct ParamSpec {
  std::vector<ParamEntry> entries;

  std::size_t size() const { return entries.size(); }
  void validate() const;
  std::vector<double> initial_values() const;
  // Componentwise projection into [lower, upper].
  std::vector<double> clamp(std::vector<double> values) const;
};

struct CalibrationResult {
  std::vector<double> best_values;
  double best_objective = 0.0;
  std::vector<double> trace;  // running best per iteration, non-decreasing
  int evaluations = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Derivative-free simplex maximization over the box in spec. Proposals are
// clamped into the box. Stops when the simplex objective spread drops below
// tolerance or the evaluation budget runs out; returns the best point seen.
CalibrationResult nelder_mead(const Objective& objective, const ParamSpec& spec,
                              int max_evals, double tolerance);

// Exhaustive lattice maximization, points_per_dim per axis (endpoints
// included). Intended as a cross-check for low-dimensional problems.
CalibrationResult grid_search(const Objective& objective, const ParamSpec& spec,
                              int points_per_dim);

}  // namespace radsim
