#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ttsa/assumptions.hpp"
#include "ttsa/error.hpp"
#include "ttsa/problem.hpp"

using namespace ttsa;
using ttsa::test::p1;

namespace {

// Random instance with diagonally dominant A11 and A22, entries in
// [-0.25, 0.25].
ProblemInstance random_instance(std::mt19937_64& rng, int dx, int dy) {
  std::uniform_real_distribution<double> off(-0.05, 0.05), diag(0.15, 0.25),
      any(-0.25, 0.25);
  auto fill = [&](int r, int c, bool dominant) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = dominant && i == j ? diag(rng) : off(rng);
    return m;
  };
  Vector b1(dx), b2(dy);
  for (int i = 0; i < dx; ++i) b1(i) = any(rng);
  for (int i = 0; i < dy; ++i) b2(i) = any(rng);
  return ProblemInstance(fill(dx, dx, true), fill(dx, dy, false),
                         fill(dy, dx, false), fill(dy, dy, true), b1, b2);
}

}  // namespace

TEST_SUITE("problem-core") {

TEST_CASE("construction validates shapes and finiteness") {
  CHECK_THROWS_AS(ProblemInstance(Matrix::Identity(2, 2), Matrix::Zero(2, 1),
                                  Matrix::Zero(1, 2), Matrix::Identity(1, 1),
                                  Vector::Zero(3), Vector::Zero(1)),
                  Error);
  CHECK_THROWS_AS(ProblemInstance::scalar(NAN, 0, 0, 1, 0, 0), Error);
  try {
    ProblemInstance::scalar(1, 0, 0, 1, INFINITY, 0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("exact solution of a decoupled homogeneous system is zero") {
  Matrix a11(2, 2), a22(1, 1);
  a11 << 0.2, 0.05, 0.0, 0.1;
  a22 << 0.3;
  const ProblemInstance p(a11, Matrix::Zero(2, 1), Matrix::Zero(1, 2), a22,
                          Vector::Zero(2), Vector::Zero(1));
  const ExactSolution s = exact_solution(p);
  CHECK(s.x_star.norm() == 0.0);
  CHECK(s.y_star.norm() == 0.0);
}

TEST_CASE("scalar P1 matches a direct 2x2 solve") {
  const ExactSolution s = exact_solution(p1());
  // Cramer's rule on [[0.25, 0.1], [-0.1, 0.25]] (x, y) = (0.5, 0.25).
  const double det = 0.25 * 0.25 - 0.1 * (-0.1);
  const double x = (0.5 * 0.25 - 0.1 * 0.25) / det;
  const double y = (0.25 * 0.25 - (-0.1) * 0.5) / det;
  CHECK(s.x_star(0) == doctest::Approx(x).epsilon(1e-14));
  CHECK(s.y_star(0) == doctest::Approx(y).epsilon(1e-14));
  CHECK(s.y_star(0) == doctest::Approx(0.45 / 0.29).epsilon(1e-14));
  CHECK(s.x_star(0) == doctest::Approx(1.379310).epsilon(1e-6));
}

TEST_CASE("random instances satisfy the system to 1e-10") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const ProblemInstance p = random_instance(rng, 3, 2);
    const ExactSolution s = exact_solution(p);
    CHECK(relative_residual(p, s.x_star, s.y_star) <= 1e-10);
  }
}

TEST_CASE("singular blocks are rejected") {
  CHECK_THROWS_AS(exact_solution(ProblemInstance::scalar(0, 1, 1, 1, 0, 0)),
                  Error);
  // Delta = 0.1 - 0.1 * 1 / 0.1 * 0.01 ... make it exactly zero.
  const ProblemInstance p = ProblemInstance::scalar(0.2, 0.1, 0.2, 0.1, 1, 1);
  try {
    exact_solution(p);
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMatrix);
  }
}

TEST_CASE("reduced matrix") {
  CHECK(reduced_matrix(p1())(0, 0) == doctest::Approx(0.29).epsilon(1e-15));
  // GTD single-state blocks.
  CHECK(reduced_matrix(ProblemInstance::scalar(0.25, 0.025, -0.025, 0, 0.5, 0))(0, 0) ==
        doctest::Approx(0.0025).epsilon(1e-14));
  // Block triangular: exactly A22.
  std::mt19937_64 rng(3);
  ProblemInstance p = random_instance(rng, 3, 2);
  p.a21.setZero();
  CHECK(reduced_matrix(p) == p.a22);
}

TEST_CASE("spectral summary") {
  const SpectralSummary s = spectral_summary(p1(), SampleTable::noiseless(p1()));
  CHECK(s.gamma == doctest::Approx(0.25));
  CHECK(s.rho == doctest::Approx(0.29));
  CHECK(s.lambda1 == doctest::Approx(0.25));
  CHECK(s.sigman == doctest::Approx(0.29));
  CHECK(s.b_bound == doctest::Approx(0.5));

  Matrix a11(2, 2);
  a11 << 0.1, 0.0, 0.0, 0.2;
  ProblemInstance d(a11, Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                    Matrix::Constant(1, 1, 0.2), Vector::Zero(2), Vector::Zero(1));
  SpectralSummary sd = spectral_summary(d, SampleTable::noiseless(d));
  CHECK(sd.gamma == doctest::Approx(0.1));
  CHECK(sd.lambda1 == doctest::Approx(0.1));
  CHECK(sd.lambdan == doctest::Approx(0.2));

  d.a11 << 0.2, 0.1, -0.1, 0.2;
  sd = spectral_summary(d, SampleTable::noiseless(d));
  CHECK(sd.gamma == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(sd.lambda1 <= sd.lambdan);
  CHECK(sd.gamma <= sd.lambdan);
  CHECK(sd.rho <= sd.sigman);
}

TEST_CASE("gamma ignores skew-symmetric parts of A11") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int t = 0; t < 20; ++t) {
    ProblemInstance p = random_instance(rng, 3, 2);
    const double g = spectral_summary(p, SampleTable::noiseless(p)).gamma;
    Matrix k(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k(i, j) = u(rng);
    p.a11 += k - k.transpose();
    CHECK(spectral_summary(p, SampleTable::noiseless(p)).gamma ==
          doctest::Approx(g).epsilon(1e-12));
  }
}

TEST_CASE("spectral summary rejects non-positive blocks") {
  const auto p = ProblemInstance::scalar(-0.1, 0, 0, 0.2, 0, 0);
  try {
    spectral_summary(p, SampleTable::noiseless(p));
    FAIL("expected NotPositive");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositive);
  }
}

TEST_CASE("assumption report") {
  const auto chain = test::two_state();

  SUBCASE("a block of norm 0.3 breaks the bound") {
    SampleTable t = make_spread_table(p1(), chain, 0.0);
    t.a12[0](0, 0) = 0.3;
    const auto r = validate_assumptions(p1(), chain, t);
    CHECK_FALSE(r.bounded_ok);
    CHECK(r.worst_block_norm == doctest::Approx(0.3));
    CHECK_FALSE(r.ok());
  }
  SUBCASE("negative A11") {
    const auto p = ProblemInstance::scalar(-0.1, 0, 0, 0.2, 0, 0);
    const auto r = validate_assumptions(p, FiniteMarkovChain::single_state(),
                                        SampleTable::noiseless(p));
    CHECK_FALSE(r.positivity_ok);
    CHECK_FALSE(r.a11_positive);
    CHECK(r.delta_positive);
  }
  SUBCASE("symmetric two-state noise of +-0.05 on A12 passes every check") {
    // Stationary pi = (2/3, 1/3): +0.05 / -0.1 keeps the mean exact.
    SampleTable t;
    t.push_back(ProblemInstance::scalar(0.25, 0.15, -0.1, 0.25, 0.5, 0.25));
    t.push_back(ProblemInstance::scalar(0.25, 0.0, -0.1, 0.25, 0.5, 0.25));
    const auto r = validate_assumptions(p1(), chain, t, 0.5);
    CHECK(r.ok());
    CHECK(r.details.empty());
  }
  SUBCASE("the same noise on A11 of P1 leaves no headroom under 1/4") {
    SampleTable t;
    t.push_back(ProblemInstance::scalar(0.30, 0.1, -0.1, 0.25, 0.5, 0.25));
    t.push_back(ProblemInstance::scalar(0.15, 0.1, -0.1, 0.25, 0.5, 0.25));
    const auto r = validate_assumptions(p1(), chain, t);
    CHECK(r.stationary_ok);
    CHECK_FALSE(r.bounded_ok);
  }
  SUBCASE("declared B") {
    const auto t = make_spread_table(p1(), chain, 0.1);
    CHECK_FALSE(validate_assumptions(p1(), chain, t, 0.5).bounded_ok);
    CHECK(validate_assumptions(p1(), chain, t, 0.6).bounded_ok);
  }
  SUBCASE("stationary mismatch") {
    SampleTable t = make_spread_table(p1(), chain, 0.1);
    t.b1[0](0) += 0.01;
    const auto r = validate_assumptions(p1(), chain, t);
    CHECK_FALSE(r.stationary_ok);
    CHECK(r.stationary_gap > 1e-3);
  }
  SUBCASE("only Delta positive is flagged") {
    // A11 < 0 but Delta = a22 - a21 a12 / a11 > 0.
    const auto p = ProblemInstance::scalar(-0.1, 0.1, 0.1, 0.1, 0, 0);
    const auto r = validate_assumptions(p, FiniteMarkovChain::single_state(),
                                        SampleTable::noiseless(p));
    CHECK_FALSE(r.a11_positive);
    CHECK(r.delta_positive);
    bool flagged = false;
    for (const auto& d : r.details) flagged |= d.find("only one") != std::string::npos;
    CHECK(flagged);
  }
}

}  // TEST_SUITE
