#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ttsa/assumptions.hpp"
#include "ttsa/bigfloat.hpp"
#include "ttsa/engine.hpp"
#include "ttsa/markov.hpp"
#include "ttsa/schedule.hpp"

namespace ttsa {

struct C1C2 {
  ExtReal c1;
  ExtReal c2;
  // Intermediates of C1: C1 = (E||Z0||^2 + C0 Gamma2) exp(2 C0 Gamma1).
  ExtReal gamma1;
  ExtReal gamma2;
};

// Literal evaluation in extended precision. Throws Overflow if C1 or C2
// saturates, InvalidArgument for gamma, rho or lambda1 <= 0 or negative
// c0 / e_z0_sq.
C1C2 compute_c1_c2(const SpectralSummary& spec, double alpha0, double c0,
                   double e_z0_sq);

// C2 for a given C1.
ExtReal compute_c2(const SpectralSummary& spec, const ExtReal& c1);

// Bound on V at the transient index:
//   8(b0 + g r a0)(1+a0)^{2K} V0 / (b0 l1^2) + 25(B+|Y*|)^2 (1+a0)^{2K} / l1^6
ExtReal transient_bound(const SpectralSummary& spec, const StepSchedule& s,
                        std::uint64_t k_star, double v0);

struct PsiPair {
  ExtReal psi1;
  ExtReal psi2;
};

// Bias and variance coefficients of the simplified bound Psi1 V0/k +
// Psi2/k^{2/3}. `c_mix` is the geometric mixing constant C.
PsiPair psi(const SpectralSummary& spec, const StepSchedule& s,
            std::uint64_t k_star, const ExtReal& c1, const ExtReal& c2,
            double c_mix);

struct RateConstants {
  double c0 = 0.0;
  ExtReal c1, c2, gamma1, gamma2;
  std::uint64_t k_star = 0;
  ExtReal v_kstar_bound;
  ExtReal psi1, psi2;
  double gamma = 0.0, rho = 0.0, lambda1 = 0.0, sigman = 0.0;
  double b_bound = 0.0, y_star_norm = 0.0;
  double alpha0 = 0.0, beta0 = 0.0, c_mix = 0.0;
  // Initial quantities the constants were built from.
  double e_z0_sq = 0.0;
  double v0 = 0.0;
};

// Everything above for one experiment with a deterministic start point,
// so E||Z0||^2 = ||Z0||^2.
RateConstants rate_constants(const Experiment& exp, const MixingProfile& mix,
                             std::uint64_t c0_horizon = 10'000'000);

struct BoundCurve {
  std::vector<std::uint64_t> ks;
  // Full rate bound on V_k (evaluated with n = k in place of k+1) and
  // the simplified Psi form. Entries with k < 1 are +inf.
  std::vector<ExtReal> full;
  std::vector<ExtReal> simplified;
};

// Requires the (2/3, 1) schedule family (InvalidArgument otherwise).
BoundCurve theorem_bound_curve(const RateConstants& c, const StepSchedule& s,
                               std::span<const std::uint64_t> ks);

// Psi1 V0/k + Psi2/k^{2/3}.
ExtReal simplified_bound(const ExtReal& psi1, const ExtReal& psi2, double v0,
                         std::uint64_t k);

struct RecursionPair {
  std::uint64_t k_from = 0, k_to = 0;
  double lhs = 0.0;        // mean V at k_to
  ExtReal rhs;             // composed recursion bound + slack
  double slack = 0.0;      // 3 standard errors
  bool pass = false;
};

struct RecursionCheck {
  double pass_fraction = 1.0;
  std::size_t n_pairs = 0;
  std::size_t n_pass = 0;
  std::vector<RecursionPair> pairs;
};

// Tests the one-step recursion on every consecutive checkpoint pair with
// k_from >= K*. Pairs further apart than one step use the recursion
// composed over the gap (coefficients max(0, 1 - rho beta_t)). Slack is 3
// standard errors of the difference, paired per trajectory when the curve
// carries samples.
RecursionCheck empirical_recursion_check(const McCurve& curve,
                                         const RateConstants& c,
                                         const StepSchedule& s,
                                         const MixingProfile& mix);

// Decimal-string report.
nlohmann::json to_json(const RateConstants& c);

}  // namespace ttsa
