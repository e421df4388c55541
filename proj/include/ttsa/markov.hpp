#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ttsa/linalg.hpp"
#include "ttsa/problem.hpp"

namespace ttsa {

// Row-stochastic transition matrix on states 0..n-1.
class FiniteMarkovChain {
 public:
  // Throws InvalidArgument unless every entry is >= 0 and every row sums
  // to 1 within 1e-12. Ergodicity is checked on demand.
  explicit FiniteMarkovChain(Matrix transition);

  static FiniteMarkovChain single_state();

  std::size_t n_states() const {
    return static_cast<std::size_t>(transition_.rows());
  }
  const Matrix& transition() const { return transition_; }
  double prob(std::size_t from, std::size_t to) const {
    return transition_(static_cast<Eigen::Index>(from),
                       static_cast<Eigen::Index>(to));
  }

  // Irreducible and aperiodic: some power P^m with m <= n^2 is entrywise
  // positive.
  bool is_ergodic() const;

  // Cumulative row sums used for inverse-CDF sampling.
  const Matrix& row_cdf() const { return cdf_; }

 private:
  Matrix transition_;
  Matrix cdf_;
};

// pi P = pi, sum(pi) = 1. Throws NotErgodic for reducible or periodic chains.
Vector stationary_distribution(const FiniteMarkovChain& chain);

// Borrowed view of one state's sampled blocks.
struct StateBlocks {
  const Matrix& a11;
  const Matrix& a12;
  const Matrix& a21;
  const Matrix& a22;
  const Vector& b1;
  const Vector& b2;
};

// Per-state noisy blocks A_ij(s), b_i(s).
struct SampleTable {
  std::vector<Matrix> a11, a12, a21, a22;
  std::vector<Vector> b1, b2;

  std::size_t n_states() const { return a11.size(); }
  StateBlocks blocks(std::size_t s) const {
    return {a11[s], a12[s], a21[s], a22[s], b1[s], b2[s]};
  }

  void push_back(const ProblemInstance& blocks);

  // Throws InvalidArgument if any state disagrees with the shapes of p.
  void check_shapes(const ProblemInstance& p) const;

  // One-state table equal to the nominal blocks (noiseless sampling).
  static SampleTable noiseless(const ProblemInstance& p);
};

// Stationary-weighted block means.
ProblemInstance stationary_mean(const SampleTable& table, const Vector& pi);

// Builds a table whose stationary means equal `nominal` exactly: state s
// receives nominal + h * (1[s == 0] - pi_0) * E for a fixed unit-norm
// pattern E per block. Matrix blocks use h = min(spread, 1/4 - ||A_ij||)
// so the 1/4 bound is preserved; vector blocks use h = spread.
SampleTable make_spread_table(const ProblemInstance& nominal,
                              const FiniteMarkovChain& chain, double spread);

// Exact mixing behaviour of a finite chain together with the table it
// indexes, computed from transition-matrix powers.
class MixingProfile {
 public:
  struct Options {
    // Stop once the block deviation falls below this level.
    double floor = 1e-13;
    std::size_t max_steps = 200000;
  };

  MixingProfile(const FiniteMarkovChain& chain, const SampleTable& table);
  MixingProfile(const FiniteMarkovChain& chain, const SampleTable& table,
                Options options);

  // Smallest k such that every conditional block expectation from every
  // start state is within alpha of its stationary mean for all j >= k.
  std::uint64_t tau(double alpha) const;

  // d_k = max over start states and blocks of the conditional deviation.
  const std::vector<double>& deviation() const { return deviation_; }
  // Max over start states of the total-variation distance to pi.
  const std::vector<double>& tv_decay() const { return tv_; }
  // Fitted C in tau(alpha) ~ C log(1/alpha).
  double c_geometric() const { return c_geometric_; }

 private:
  std::vector<double> deviation_;
  std::vector<double> tail_max_;
  std::vector<double> tv_;
  double decay_rate_ = 0.0;
  double c_geometric_ = 0.0;
};

std::uint64_t mixing_time(const FiniteMarkovChain& chain,
                          const SampleTable& table, double alpha);

struct GeometricFit {
  double c = 0.0;
  double intercept = 0.0;
  // RMS misfit of the proportional model tau = C log(1/alpha), divided by
  // the mean tau.
  double relative_residual = 0.0;
};

// Least-squares slope of tau against log(1/alpha). Needs >= 5 pairs with
// alpha spanning at least two decades; throws InsufficientData otherwise.
GeometricFit fit_geometric_constant(std::span<const double> alphas,
                                    std::span<const double> taus);
GeometricFit fit_geometric_constant(const MixingProfile& profile);

// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Seed of trajectory `index`: splitmix64(splitmix64(base) + index).
std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index);

// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
double uniform01(std::mt19937_64& rng);

// How the chain's initial state is chosen for a trajectory.
struct ChainStart {
  std::optional<std::size_t> fixed_state;  // empty: draw from pi

  static ChainStart stationary() { return {}; }
  static ChainStart state(std::size_t s) { return {s}; }
};

// Single-owner sample path over a chain and its table.
class SampleStream {
 public:
  struct Sample {
    std::size_t state;
    StateBlocks blocks;
  };

  // With a stationary start the initial state is drawn from pi using the
  // stream's own generator.
  SampleStream(const FiniteMarkovChain& chain, const SampleTable& table,
               std::uint64_t seed, ChainStart start, const Vector& pi);

  // Advances one step by inverse-CDF sampling of the current row.
  Sample next_sample();

  std::size_t current_state() const { return state_; }
  std::uint64_t steps() const { return k_; }

 private:
  const FiniteMarkovChain* chain_;
  const SampleTable* table_;
  std::mt19937_64 rng_;
  std::size_t state_ = 0;
  std::uint64_t k_ = 0;
};

}  // namespace ttsa
