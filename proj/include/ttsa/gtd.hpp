#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ttsa/markov.hpp"
#include "ttsa/problem.hpp"

namespace ttsa {

struct MarkovRewardProcess {
  Matrix transition;
  Vector reward;  // r(zeta), one per state
  double discount = 0.0;

  // Throws InvalidArgument on bad shapes, a discount outside [0, 1) or a
  // transition matrix that is not row-stochastic.
  void check() const;
  std::size_t n_states() const { return static_cast<std::size_t>(reward.size()); }
};

// Row zeta holds phi(zeta).
struct FeatureMap {
  Matrix phi;
  std::size_t dim() const { return static_cast<std::size_t>(phi.cols()); }
};

struct GtdInstance {
  ProblemInstance problem;  // stationary means of the table
  FiniteMarkovChain chain;  // over reachable pairs (zeta, zeta')
  SampleTable table;
  std::vector<std::pair<std::size_t, std::size_t>> pair_states;
};

// Pair state xi = (zeta, zeta') with blocks
//   A11 = phi phi^T, A12 = phi (phi - g phi')^T, A21 = (g phi' - phi) phi^T,
//   A22 = 0, b1 = r(zeta) phi, b2 = 0
// and transitions (zeta, zeta') -> (zeta', zeta'') with P(zeta', zeta'').
// Only pairs with P(zeta, zeta') > 0 are kept. Throws FeatureScale when a
// block norm exceeds 1/4, NotErgodic when the pair chain is not ergodic.
GtdInstance build_gtd_instance(const MarkovRewardProcess& mrp,
                               const FeatureMap& features);

// Largest block norm over all reachable pairs.
double max_gtd_block_norm(const MarkovRewardProcess& mrp,
                          const FeatureMap& features);

struct ScaledFeatures {
  FeatureMap features;
  double factor = 1.0;
};

// Multiplies phi by the largest c keeping every block norm <= 1/4.
// Throws FeatureScale for all-zero features.
ScaledFeatures autoscale_features(const MarkovRewardProcess& mrp,
                                  const FeatureMap& features);

struct BellmanSolution {
  Vector y_star;
  Vector values;  // phi(zeta)^T Y* per state
};

// Solves E[A12] Y = E[b1] with expectations under the MRP's own stationary
// distribution, i.e. Phi^T D (I - g P) Phi Y = Phi^T D r.
BellmanSolution bellman_fixed_point(const MarkovRewardProcess& mrp,
                                    const FeatureMap& features);

// || A11^{-1}(b1 - A12 Y*) - A11^{-1}(A21^T Y* + b1) ||, the gap between the
// exact X* and the printed tracking expression.
double x_star_tracking_check(const ProblemInstance& p, const ExactSolution& sol);

}  // namespace ttsa
