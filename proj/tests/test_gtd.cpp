#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ttsa/error.hpp"
#include "ttsa/gtd.hpp"

using namespace ttsa;

namespace {

MarkovRewardProcess single(double reward, double discount) {
  return {Matrix::Ones(1, 1), Vector::Constant(1, reward), discount};
}

FeatureMap scalar_phi(double v) { return {Matrix::Constant(1, 1, v)}; }

MarkovRewardProcess two_state_mrp() {
  Matrix p(2, 2);
  p << 0.7, 0.3, 0.4, 0.6;
  Vector r(2);
  r << 1.0, -0.5;
  return {p, r, 0.9};
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("gtd-adapter") {

TEST_CASE("single-state blocks") {
  const GtdInstance g = build_gtd_instance(single(1.0, 0.9), scalar_phi(0.5));
  const ProblemInstance& p = g.problem;
  CHECK(p.a11(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.a12(0, 0) == doctest::Approx(0.025).epsilon(1e-13));
  CHECK(p.a21(0, 0) == doctest::Approx(-0.025).epsilon(1e-13));
  CHECK(p.a22(0, 0) == 0.0);
  CHECK(p.b1(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.b2(0) == 0.0);
  CHECK(g.pair_states.size() == 1);
  CHECK(reduced_matrix(p)(0, 0) == doctest::Approx(0.0025).epsilon(1e-12));
}

TEST_CASE("zero discount mirrors A11") {
  const MarkovRewardProcess m{two_state_mrp().transition, two_state_mrp().reward, 0.0};
  Matrix phi(2, 2);
  phi << 0.3, 0.1, -0.1, 0.3;
  const GtdInstance g = build_gtd_instance(m, {phi});
  for (std::size_t s = 0; s < g.table.n_states(); ++s) {
    CHECK((g.table.a12[s] - g.table.a11[s]).norm() <= 1e-15);
    CHECK((g.table.a21[s] + g.table.a11[s]).norm() <= 1e-15);
  }
}

TEST_CASE("degenerate and badly scaled inputs") {
  const GtdInstance zero = build_gtd_instance(single(1.0, 0.9), scalar_phi(0.0));
  CHECK(kind_of([&] { exact_solution(zero.problem); }) == ErrorKind::SingularMatrix);

  const FeatureMap tab{0.5 * Matrix::Identity(2, 2)};
  CHECK(kind_of([&] { build_gtd_instance(two_state_mrp(), tab); }) == ErrorKind::FeatureScale);
  CHECK(max_gtd_block_norm(two_state_mrp(), tab) > 0.25);

  Matrix id = Matrix::Identity(2, 2);
  const MarkovRewardProcess stuck{id, Vector::Ones(2), 0.5};
  CHECK(kind_of([&] { build_gtd_instance(stuck, FeatureMap{0.1 * id}); }) ==
        ErrorKind::NotErgodic);

  CHECK(kind_of([&] { single(1.0, 1.0).check(); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { autoscale_features(two_state_mrp(), FeatureMap{Matrix::Zero(2, 2)}); }) ==
        ErrorKind::FeatureScale);
}

TEST_CASE("autoscaling") {
  const FeatureMap tab{0.5 * Matrix::Identity(2, 2)};
  const ScaledFeatures s = autoscale_features(two_state_mrp(), tab);
  CHECK(s.factor < 1.0);
  CHECK(max_gtd_block_norm(two_state_mrp(), s.features) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_NOTHROW(build_gtd_instance(two_state_mrp(), s.features));
}

TEST_CASE("Bellman fixed point") {
  const BellmanSolution b = bellman_fixed_point(single(1.0, 0.9), scalar_phi(0.5));
  CHECK(b.y_star(0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(b.values(0) == doctest::Approx(10.0).epsilon(1e-12));

  const BellmanSolution z = bellman_fixed_point(single(0.0, 0.9), scalar_phi(0.5));
  CHECK(z.y_star.norm() == 0.0);

  // Tabular features recover the exact value function.
  const auto m = two_state_mrp();
  const BellmanSolution t = bellman_fixed_point(m, {0.5 * Matrix::Identity(2, 2)});
  const Vector v = (Matrix::Identity(2, 2) - 0.9 * m.transition).lu().solve(m.reward);
  CHECK((t.values - v).cwiseAbs().maxCoeff() <= 1e-10);

  // The adapter's nominal system has the same slow solution.
  const ScaledFeatures sf = autoscale_features(m, {0.5 * Matrix::Identity(2, 2)});
  const GtdInstance g = build_gtd_instance(m, sf.features);
  const ExactSolution sol = exact_solution(g.problem);
  const BellmanSolution bs = bellman_fixed_point(m, sf.features);
  CHECK((sol.y_star - bs.y_star).norm() <= 1e-9 * bs.y_star.norm());
  CHECK(sol.x_star.norm() <= 1e-9 * (1 + bs.y_star.norm()));
}

TEST_CASE("tracking expression") {
  const GtdInstance g = build_gtd_instance(single(1.0, 0.9), scalar_phi(0.5));
  const ExactSolution sol = exact_solution(g.problem);
  CHECK(std::abs(sol.x_star(0)) <= 1e-12);
  CHECK(x_star_tracking_check(g.problem, sol) <= 1e-10);

  const GtdInstance z = build_gtd_instance(single(0.0, 0.9), scalar_phi(0.5));
  CHECK(x_star_tracking_check(z.problem, exact_solution(z.problem)) == 0.0);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 1.0), f(-1.0, 1.0);
  Matrix p(3, 3), phi(3, 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p(i, j) = u(rng);
    p.row(i) /= p.row(i).sum();
    for (int j = 0; j < 2; ++j) phi(i, j) = f(rng);
  }
  const MarkovRewardProcess m{p, Vector::Constant(3, 1.0), 0.8};
  const ScaledFeatures sf = autoscale_features(m, {phi});
  const GtdInstance r = build_gtd_instance(m, sf.features);
  const double dev = x_star_tracking_check(r.problem, exact_solution(r.problem));
  // A21 = -A12^T under this mapping, so the two forms coincide.
  CHECK(dev <= 1e-10);
}

TEST_CASE("pair chain consistency") {
  const auto m = two_state_mrp();
  Matrix phi(2, 2);
  phi << 0.3, 0.1, -0.1, 0.3;
  const GtdInstance g = build_gtd_instance(m, {phi});
  const Vector pi_pairs = stationary_distribution(g.chain);
  const ProblemInstance mean = stationary_mean(g.table, pi_pairs);
  CHECK((mean.a11 - g.problem.a11).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((mean.a12 - g.problem.a12).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((mean.b1 - g.problem.b1).cwiseAbs().maxCoeff() <= 1e-12);

  const Vector pi = stationary_distribution(FiniteMarkovChain(m.transition));
  Vector marginal = Vector::Zero(2);
  for (std::size_t i = 0; i < g.pair_states.size(); ++i)
    marginal(static_cast<Eigen::Index>(g.pair_states[i].first)) += pi_pairs(static_cast<Eigen::Index>(i));
  CHECK((marginal - pi).cwiseAbs().maxCoeff() <= 1e-12);
}

}  // TEST_SUITE
