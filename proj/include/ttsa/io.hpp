#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ttsa/engine.hpp"
#include "ttsa/gtd.hpp"
#include "ttsa/markov.hpp"
#include "ttsa/problem.hpp"
#include "ttsa/restart.hpp"
#include "ttsa/schedule.hpp"

namespace ttsa {

using Json = nlohmann::json;

// All loaders throw Config on malformed input.

// Nested row-major arrays; a bare number is read as a 1 x 1 matrix.
Matrix matrix_from_json(const Json& j, const char* what);
Vector vector_from_json(const Json& j, const char* what);

// {"a11": [[...]], "a12": ..., "a21": ..., "a22": ..., "b1": [...], "b2": [...]}
ProblemInstance problem_from_json(const Json& j);

struct ChainAndTable {
  FiniteMarkovChain chain;
  SampleTable table;
};
// {"transition": [[...]], "states": [{"a11": ..., "b1": ..., ...}, ...]}
ChainAndTable chain_from_json(const Json& j);

// {"alpha": {"a0": 8.2, "exp": 0.6667}, "beta": {"b0": 3.5, "exp": 1.0}};
// either family may instead be {"constant": c}.
StepSchedule schedule_from_json(const Json& j);
Json to_json(const StepSchedule& s);

struct MrpWithFeatures {
  MarkovRewardProcess mrp;
  FeatureMap features;
};
// {"transition": [[...]], "reward": [...], "discount": 0.9, "features": [[...]]}
MrpWithFeatures mrp_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);

enum class RunMode { Plain, Restart, Sweep };

struct RestartSettings {
  std::optional<double> delta0;  // default: V0 of the start point
  double ratio = 64.0;           // delta0 / epsilon
  std::optional<double> psi1, psi2;  // empirical fit when absent
  std::uint64_t pilot_traj = 100;
  std::uint64_t pilot_horizon = 100000;
  std::uint64_t max_epochs = 64;
};

struct ExperimentConfig {
  ProblemInstance problem;
  FiniteMarkovChain chain = FiniteMarkovChain::single_state();
  SampleTable table;
  StepSchedule schedule;
  Vector x0, y0;
  ChainStart start;
  std::uint64_t horizon = 100000;
  int per_decade = 25;
  std::vector<std::uint64_t> checkpoints;  // explicit grid; empty: geometric
  std::uint64_t n_traj = 200;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::Plain;
  std::vector<double> sweep_exponents{0.55, 0.6, 2.0 / 3.0, 0.75, 0.85};
  double window_lo = 1e3, window_hi = 1e5;
  RestartSettings restart;
  std::string out;
  bool from_gtd = false;

  std::vector<std::uint64_t> checkpoint_grid() const;
  Experiment experiment() const;
};

// Problem sources: "problem" (inline object or path), or "gtd" (inline MRP
// object or path, features rescaled automatically when "autoscale" is
// true). Noise sources: "chain" (inline object or path with per-state
// blocks), "noise": {"transition": [[...]], "spread": d}, or none for a
// noiseless single-state table. Relative paths resolve against `base_dir`.
ExperimentConfig config_from_json(const Json& j,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Curve CSV: k, alpha_k, beta_k, mse_x, mse_y, lyapunov, se_lyapunov.
void write_curve_csv(std::ostream& os, const McCurve& c);
// Epoch CSV: epoch, n_k, cumulative_iters, v_estimate, v_se, delta_target.
void write_epoch_csv(std::ostream& os, const RestartLog& log);

struct CsvColumns {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  const std::vector<double>& column(const std::string& name) const;
};
CsvColumns read_csv(std::istream& is);

// %.17g
std::string format_double(double v);

}  // namespace ttsa
