#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttsa/engine.hpp"

namespace ttsa {

enum class PsiSource { Theoretical, Empirical };

std::string to_string(PsiSource s);

struct RestartConfig {
  double delta0 = 1.0;   // V0 <= delta0
  double epsilon = 0.5;  // target accuracy
  double psi1 = 0.0;
  double psi2 = 0.0;
  PsiSource source = PsiSource::Empirical;
  std::uint64_t max_epochs = 64;
};

// Throws Config unless delta0, epsilon > 0 and psi1, psi2 >= 0 are finite.
// epsilon >= delta0 is accepted and yields zero epochs.
void validate(const RestartConfig& cfg);

// Smallest K >= 0 with delta0 2^-K <= epsilon.
std::uint64_t epoch_count(const RestartConfig& cfg);

// N_k = ceil(max{4 psi1, psi2^{3/2} / (delta0^{3/2} 2^{-3(k+1)/2})}).
// Throws InvalidArgument for k < 1, Overflow above 2^62.
std::uint64_t epoch_length(const RestartConfig& cfg, std::uint64_t k);

struct RestartBudget {
  std::uint64_t epochs = 0;
  std::uint64_t total = 0;  // sum of N_k
  // 4 psi1 K + (4 psi2)^{3/2} ceil(eps^{-3/2}), as printed.
  double literal_bound = 0.0;
  bool literal_holds = true;
  // K max(ceil(4 psi1), 1) + r/(r-1) (4 psi2/eps)^{3/2}, r = 2^{3/2}; always
  // >= total.
  double rigorous_bound = 0.0;
};

RestartBudget budget_restarted(const RestartConfig& cfg);

struct PlainBudget {
  std::uint64_t k = 0;           // smallest k with the bound <= epsilon
  std::uint64_t order_form = 0;  // ceil(V0/eps) + ceil(eps^{-3/2})
};

// Inverts psi1 v0/k + psi2/k^{2/3} <= epsilon by bisection.
PlainBudget budget_plain(double psi1, double psi2, double v0, double epsilon);

struct PsiFit {
  double psi1 = 0.0;
  double psi2 = 0.0;
  double envelope = 1.0;  // inflation applied so the model covers the data
};

// Nonnegative relative least squares of V_k ~ p1 v0/k + p2/k^{2/3} over the
// checkpoints k >= k_min, then both coefficients are scaled up until the
// model dominates every point. Throws InsufficientData with fewer than 2
// usable points.
PsiFit fit_psi_surrogates(const McCurve& pilot, double v0,
                          std::uint64_t k_min = 1);

// Pilot Monte Carlo run of the plain method from the experiment's start
// point, followed by fit_psi_surrogates with v0 = V(x0, y0).
PsiFit fit_psi_from_pilot(const Experiment& exp, std::size_t n_traj,
                          std::uint64_t horizon, std::uint64_t seed);

struct EpochRecord {
  std::uint64_t epoch = 0;
  std::uint64_t n_k = 0;
  std::uint64_t cumulative_iters = 0;
  double v_estimate = 0.0;
  double v_se = 0.0;
  double delta_target = 0.0;
};

struct RestartLog {
  PsiSource source = PsiSource::Empirical;
  std::size_t n_replicas = 0;
  // Row 0 is the initial point (epoch 0).
  std::vector<EpochRecord> epochs;
};

struct ReplicaRun {
  std::vector<double> v_end;  // V at the end of each epoch, local index N_k
  IterateState final_state;
};

// One restarted run. Each epoch resets the schedule index to 0 and keeps
// the chain running.
ReplicaRun run_restarted_replica(const Experiment& exp,
                                 const RestartConfig& cfg, std::uint64_t seed);

// Replica i uses substream_seed(base_seed, i). Throws BudgetExceeded when
// more than max_epochs epochs would be needed.
RestartLog run_restarted(const Experiment& exp, const RestartConfig& cfg,
                         std::size_t n_replicas, std::uint64_t base_seed);

}  // namespace ttsa
