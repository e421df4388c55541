#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ttsa/assumptions.hpp"
#include "ttsa/markov.hpp"

namespace ttsa {

// One step-size sequence: polynomial scale/(k+1)^exponent or constant.
struct StepFamily {
  enum class Kind { Polynomial, Constant };

  Kind kind = Kind::Polynomial;
  double scale = 0.0;
  double exponent = 0.0;  // ignored for Constant

  static StepFamily polynomial(double scale, double exponent) {
    return {Kind::Polynomial, scale, exponent};
  }
  static StepFamily constant(double value) {
    return {Kind::Constant, value, 0.0};
  }

  // Negative indices clamp to k = 0.
  double at(std::int64_t k) const;

  // Decay exponent as seen by summability tests (0 for Constant).
  double decay() const { return kind == Kind::Constant ? 0.0 : exponent; }
};

struct StepSchedule {
  StepFamily alpha;  // fast
  StepFamily beta;   // slow

  std::pair<double, double> at(std::int64_t k) const {
    return {alpha.at(k), beta.at(k)};
  }
  double alpha0() const { return alpha.at(0); }
  double beta0() const { return beta.at(0); }

  // alpha0/(k+1)^{2/3}, beta0/(k+1).
  static StepSchedule rate_optimal(double alpha0, double beta0) {
    return {StepFamily::polynomial(alpha0, 2.0 / 3.0),
            StepFamily::polynomial(beta0, 1.0)};
  }
  bool is_rate_optimal() const;
};

enum class Certification { Certified, Heuristic, Invalid };

std::string to_string(Certification c);

struct CertificationReport {
  Certification status = Certification::Invalid;
  // Every failed condition, in a fixed order.
  std::vector<std::string> reasons;
};

// Divergence and summability conditions that depend on the exponents only.
// Returns the failed ones (empty when all hold).
std::vector<std::string> summability_failures(const StepSchedule& s);

// Certified: all step-size conditions of the rate theorem hold, with the
// ratio bound beta0/alpha0 <= gamma/(2 rho). Heuristic: only the
// divergence/summability conditions hold. Invalid otherwise.
CertificationReport validate_schedule(const StepSchedule& s,
                                      const SpectralSummary& spec);

// Mixing time as a function of the tolerance. Any MixingProfile converts
// to one; tests also use synthetic maps such as tau = 12.
using TauFn = std::function<std::uint64_t(double)>;

TauFn tau_function(const MixingProfile& mix);

struct TransientIndex {
  std::uint64_t k_star = 0;
  // Window sum and tau * alpha_{k - tau} at k_star and k_star - 1 (the
  // latter zero when k_star == 0).
  double window_sum = 0.0;
  double lagged_product = 0.0;
  double prev_window_sum = 0.0;
  double prev_lagged_product = 0.0;
};

// Window sum sum_{t=k-tau}^{k} alpha_t and tau * alpha_{k-tau} with
// tau = tau(alpha_k), negative indices clamped to alpha_0.
std::pair<double, double> transient_quantities(const StepSchedule& s,
                                               const TauFn& tau,
                                               std::uint64_t k);
std::pair<double, double> transient_quantities(const StepSchedule& s,
                                               const MixingProfile& mix,
                                               std::uint64_t k);

// Smallest k at which both transient quantities are <= log 2 and stay so
// through a persistence window. Throws NotFound past 10^9.
TransientIndex k_star(const StepSchedule& s, const TauFn& tau);
TransientIndex k_star(const StepSchedule& s, const MixingProfile& mix);

struct C0Estimate {
  double total = 0.0;
  double partial = 0.0;
  double tail = 0.0;
  // Partial sums of the mixing, beta^2, alpha^2 and beta^2/alpha series.
  double components[4] = {0.0, 0.0, 0.0, 0.0};
};

// Estimate of sum_k (tau_k alpha_{k-tau_k} alpha_k + beta_k^2 + alpha_k^2 +
// beta_k^2/alpha_k) with tau_k = min(tau(alpha_k), k): the partial sum to
// `horizon` plus analytic power-law tails (log-weighted for the mixing
// series). Throws Diverges when the series does not converge,
// InvalidArgument for zero steps.
C0Estimate c0_estimate(const StepSchedule& s, const TauFn& tau,
                       std::uint64_t horizon = 10'000'000);
C0Estimate c0_estimate(const StepSchedule& s, const MixingProfile& mix,
                       std::uint64_t horizon = 10'000'000);

}  // namespace ttsa
