#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ttsa/assumptions.hpp"
#include "ttsa/markov.hpp"
#include "ttsa/problem.hpp"
#include "ttsa/schedule.hpp"

namespace ttsa {

// (X_k, Y_k) together with the schedule index k used for the next step.
struct IterateState {
  std::uint64_t k = 0;
  Vector x;
  Vector y;
};

// Coordinates beyond this magnitude are reported as divergence.
inline constexpr double kDivergenceBound = 1e100;

// One synchronous step: both updates read the step-k iterate.
//   X <- X - alpha (A11(s) X + A12(s) Y - b1(s))
//   Y <- Y - beta  (A21(s) X + A22(s) Y - b2(s))
// Increments k. Throws NonFinite (with the step index) on divergence.
void sa_step(IterateState& state, double alpha, double beta,
             const StateBlocks& blocks);

// Same step with alpha_k, beta_k taken from the schedule at state.k.
IterateState sa_step(const IterateState& state, const StepSchedule& schedule,
                     const StateBlocks& blocks);

// Markovian noise: sampled drift minus nominal drift at (x, y).
struct MarkovNoise {
  Vector epsilon;
  Vector psi;
};
MarkovNoise markov_noise(const StateBlocks& blocks,
                         const ProblemInstance& nominal, const Vector& x,
                         const Vector& y);

struct ResidualState {
  Vector x_hat;
  Vector y_hat;
  double z_hat_sq = 0.0;
};

// Affine change of variables
//   x_hat = x - A11^{-1}(b1 - A12 y),  y_hat = y - Y*
// and its inverse.
class ResidualMap {
 public:
  ResidualMap(const ProblemInstance& p, const ExactSolution& sol);

  ResidualState residuals(const Vector& x, const Vector& y) const;
  // Returns (x, y) with residuals(x, y) == r.
  std::pair<Vector, Vector> reconstruct(const ResidualState& r) const;

 private:
  Vector a11_inv_b1_;
  Matrix a11_inv_a12_;
  Vector y_star_;
};

ResidualState residuals(const Vector& x, const Vector& y,
                        const ProblemInstance& p, const ExactSolution& sol);

// V = ||y_hat||^2 + (beta_k / alpha_k) ||x_hat||^2 / (2 gamma rho).
double lyapunov_value(const ResidualState& r, const StepSchedule& schedule,
                      std::uint64_t k, const SpectralSummary& spec);
double lyapunov_value(double x_hat_sq, double y_hat_sq, double alpha,
                      double beta, double gamma, double rho);

// Everything a trajectory needs, shared read-only across workers.
class Experiment {
 public:
  Experiment(ProblemInstance problem, FiniteMarkovChain chain,
             SampleTable table, StepSchedule schedule, Vector x0, Vector y0,
             ChainStart start = ChainStart::stationary());

  const ProblemInstance& problem() const { return problem_; }
  const FiniteMarkovChain& chain() const { return chain_; }
  const SampleTable& table() const { return table_; }
  const StepSchedule& schedule() const { return schedule_; }
  const Vector& x0() const { return x0_; }
  const Vector& y0() const { return y0_; }
  const ChainStart& start() const { return start_; }
  const Vector& stationary() const { return pi_; }
  const ExactSolution& solution() const { return solution_; }
  const SpectralSummary& spectral() const { return spectral_; }
  const ResidualMap& residual_map() const { return residual_map_; }

  SampleStream make_stream(std::uint64_t seed) const {
    return SampleStream(chain_, table_, seed, start_, pi_);
  }

  // Lyapunov value of (x, y) at schedule index k.
  double lyapunov(const Vector& x, const Vector& y, std::uint64_t k) const;
  ResidualState residuals(const Vector& x, const Vector& y) const {
    return residual_map_.residuals(x, y);
  }

  Experiment with_schedule(StepSchedule s) const;
  Experiment with_start_point(Vector x0, Vector y0) const;

 private:
  ProblemInstance problem_;
  FiniteMarkovChain chain_;
  SampleTable table_;
  StepSchedule schedule_;
  Vector x0_, y0_;
  ChainStart start_;
  Vector pi_;
  ExactSolution solution_;
  SpectralSummary spectral_;
  ResidualMap residual_map_;
};

// Runs `steps` iterations, drawing one sample per step from `stream`.
void advance(IterateState& state, SampleStream& stream,
             const StepSchedule& schedule, std::uint64_t steps);

struct TrajectoryRecord {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> x_hat_sq;
  std::vector<double> y_hat_sq;
  std::vector<double> lyapunov;
  IterateState final_state;
  std::size_t final_chain_state = 0;
};

// {0} U {round(10^(j/per_decade))} U {horizon}, strictly increasing.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon,
                                                 int per_decade = 25);

// Deterministic in `seed`. The horizon is the last checkpoint.
TrajectoryRecord run_trajectory(const Experiment& exp, std::uint64_t seed,
                                std::span<const std::uint64_t> checkpoints);

struct McCurve {
  std::size_t n_traj = 0;
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> alpha, beta;
  std::vector<double> mean_x, mean_y, mean_v;
  std::vector<double> se_x, se_y, se_v;
  // Per-trajectory Lyapunov values, [trajectory][checkpoint]; filled only
  // when requested.
  std::vector<std::vector<double>> samples_v;
};

// Worker count: OpenMP's maximum, capped by TTSSA_THREADS (or the
// shorter TTSA_THREADS) when set.
int worker_count();

// Fixed pairwise reduction tree; the result depends only on the order of
// `values`, never on how they were produced.
double pairwise_sum(std::span<const double> values);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(n); 0 for n = 1
};
// Pairwise-summed mean and standard error. Requires a non-empty span.
MeanSe mean_and_se(std::span<const double> values);

// Trajectory i uses substream_seed(base_seed, i). Trajectories run in
// parallel; the reduction is deterministic for any worker count.
McCurve monte_carlo_mse(const Experiment& exp, std::size_t n_traj,
                        std::uint64_t base_seed,
                        std::span<const std::uint64_t> checkpoints,
                        bool keep_samples = false);

// Serial reference: one trajectory after another, left-to-right sums.
McCurve monte_carlo_mse_serial(const Experiment& exp, std::size_t n_traj,
                               std::uint64_t base_seed,
                               std::span<const std::uint64_t> checkpoints);

}  // namespace ttsa
