#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttsa/markov.hpp"
#include "ttsa/problem.hpp"

namespace ttsa {

// Spectral quantities of A11 and Delta used by the rate constants.
struct SpectralSummary {
  double gamma = 0.0;    // smallest eigenvalue of sym(A11)
  double rho = 0.0;      // smallest eigenvalue of sym(Delta)
  double lambda1 = 0.0;  // smallest singular value of A11
  double lambdan = 0.0;  // largest singular value of A11
  double sigma1 = 0.0;   // smallest singular value of Delta
  double sigman = 0.0;   // largest singular value of Delta
  double b_bound = 0.0;  // max over states of ||b_i(s)||
  double y_star_norm = 0.0;
};

// Throws NotPositive if sym(A11) or sym(Delta) is not positive definite,
// SingularMatrix if the system has no unique solution.
SpectralSummary spectral_summary(const ProblemInstance& p,
                                 const SampleTable& table);

struct AssumptionReport {
  bool bounded_ok = false;
  double worst_block_norm = 0.0;
  double worst_b_norm = 0.0;
  bool positivity_ok = false;
  bool a11_positive = false;
  bool delta_positive = false;
  bool stationary_ok = false;
  double stationary_gap = 0.0;
  std::vector<std::string> details;

  bool ok() const { return bounded_ok && positivity_ok && stationary_ok; }
};

// Reports (never throws on) violations of the boundedness, positivity and
// stationary-mean assumptions. When `declared_b` is empty the b-norm check
// is skipped and only the 1/4 block bound is enforced.
AssumptionReport validate_assumptions(const ProblemInstance& p,
                                      const FiniteMarkovChain& chain,
                                      const SampleTable& table,
                                      std::optional<double> declared_b = {});

}  // namespace ttsa
