#include "ttsa/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

double max_b_norm(const SampleTable& table) {
  double b = 0.0;
  for (std::size_t s = 0; s < table.n_states(); ++s)
    b = std::max({b, table.b1[s].norm(), table.b2[s].norm()});
  return b;
}

}  // namespace

SpectralSummary spectral_summary(const ProblemInstance& p,
                                 const SampleTable& table) {
  const ExactSolution sol = exact_solution(p);
  const Matrix delta = reduced_matrix(p);

  SpectralSummary out;
  out.gamma = smallest_symmetric_eigenvalue(p.a11);
  out.rho = smallest_symmetric_eigenvalue(delta);
  if (!(out.gamma > 0.0) || !(out.rho > 0.0)) {
    std::ostringstream os;
    os << "symmetric parts are not positive definite (gamma = " << out.gamma
       << ", rho = " << out.rho << ")";
    throw Error(ErrorKind::NotPositive, os.str());
  }
  const Vector sa = Eigen::JacobiSVD<Matrix>(p.a11).singularValues();
  const Vector sd = Eigen::JacobiSVD<Matrix>(delta).singularValues();
  out.lambdan = sa(0);
  out.lambda1 = sa(sa.size() - 1);
  out.sigman = sd(0);
  out.sigma1 = sd(sd.size() - 1);
  out.b_bound = max_b_norm(table);
  out.y_star_norm = sol.y_star.norm();
  return out;
}

AssumptionReport validate_assumptions(const ProblemInstance& p,
                                      const FiniteMarkovChain& chain,
                                      const SampleTable& table,
                                      std::optional<double> declared_b) {
  AssumptionReport r;
  constexpr double kBlockBound = 0.25;

  // Boundedness.
  for (std::size_t s = 0; s < table.n_states(); ++s) {
    const double norms[] = {operator_norm(table.a11[s]),
                            operator_norm(table.a12[s]),
                            operator_norm(table.a21[s]),
                            operator_norm(table.a22[s])};
    for (double v : norms) r.worst_block_norm = std::max(r.worst_block_norm, v);
  }
  r.worst_b_norm = max_b_norm(table);
  r.bounded_ok = r.worst_block_norm <= kBlockBound;
  if (!r.bounded_ok) {
    std::ostringstream os;
    os << "block norm " << r.worst_block_norm << " exceeds 1/4";
    r.details.push_back(os.str());
  }
  if (declared_b && r.worst_b_norm > *declared_b) {
    r.bounded_ok = false;
    std::ostringstream os;
    os << "b-norm " << r.worst_b_norm << " exceeds declared B = "
       << *declared_b;
    r.details.push_back(os.str());
  }

  // Positivity of A11 and Delta (both required).
  r.a11_positive = smallest_symmetric_eigenvalue(p.a11) > 0.0;
  if (!r.a11_positive) r.details.push_back("sym(A11) is not positive definite");
  try {
    r.delta_positive = smallest_symmetric_eigenvalue(reduced_matrix(p)) > 0.0;
    if (!r.delta_positive)
      r.details.push_back("sym(Delta) is not positive definite");
  } catch (const Error& e) {
    r.delta_positive = false;
    r.details.push_back(e.what());
  }
  r.positivity_ok = r.a11_positive && r.delta_positive;
  if (r.a11_positive != r.delta_positive)
    r.details.push_back(
        "only one of A11, Delta is positive: the max-form condition holds "
        "but the rate analysis needs both");

  // Stationary means equal the nominal blocks.
  try {
    table.check_shapes(p);
    if (table.n_states() != chain.n_states())
      throw Error(ErrorKind::InvalidArgument,
                  "table and chain disagree on the number of states");
    const ProblemInstance mean =
        stationary_mean(table, stationary_distribution(chain));
    r.stationary_gap = std::max({(mean.a11 - p.a11).cwiseAbs().maxCoeff(),
                                 (mean.a12 - p.a12).cwiseAbs().maxCoeff(),
                                 (mean.a21 - p.a21).cwiseAbs().maxCoeff(),
                                 (mean.a22 - p.a22).cwiseAbs().maxCoeff(),
                                 (mean.b1 - p.b1).cwiseAbs().maxCoeff(),
                                 (mean.b2 - p.b2).cwiseAbs().maxCoeff()});
    r.stationary_ok = r.stationary_gap <= 1e-10;
    if (!r.stationary_ok) {
      std::ostringstream os;
      os << "stationary table means differ from nominal blocks by "
         << r.stationary_gap;
      r.details.push_back(os.str());
    }
  } catch (const Error& e) {
    r.stationary_ok = false;
    r.details.push_back(e.what());
  }
  return r;
}

}  // namespace ttsa
