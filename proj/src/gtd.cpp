#include "ttsa/gtd.hpp"

#include <cmath>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

constexpr double kBlockBound = 0.25;
constexpr double kScaleTol = 1e-12;

ProblemInstance pair_blocks(const MarkovRewardProcess& mrp,
                            const FeatureMap& f, std::size_t z,
                            std::size_t zn) {
  const Vector phi = f.phi.row(static_cast<Eigen::Index>(z)).transpose();
  const Vector phin = f.phi.row(static_cast<Eigen::Index>(zn)).transpose();
  const auto d = phi.size();
  const double g = mrp.discount;
  return ProblemInstance(phi * phi.transpose(),
                         phi * (phi - g * phin).transpose(),
                         (g * phin - phi) * phi.transpose(),
                         Matrix::Zero(d, d),
                         mrp.reward(static_cast<Eigen::Index>(z)) * phi,
                         Vector::Zero(d));
}

void check_features(const MarkovRewardProcess& mrp, const FeatureMap& f) {
  mrp.check();
  if (static_cast<std::size_t>(f.phi.rows()) != mrp.n_states() || f.phi.cols() < 1)
    throw Error(ErrorKind::InvalidArgument,
                "feature matrix must have one row per state");
  if (!all_finite(f.phi))
    throw Error(ErrorKind::InvalidArgument, "features must be finite");
}

}  // namespace

void MarkovRewardProcess::check() const {
  const auto n = reward.size();
  if (n < 1 || transition.rows() != n || transition.cols() != n)
    throw Error(ErrorKind::InvalidArgument,
                "MRP transition must be n x n with n rewards");
  if (!(discount >= 0.0 && discount < 1.0))
    throw Error(ErrorKind::InvalidArgument, "discount must lie in [0, 1)");
  if (!all_finite(reward))
    throw Error(ErrorKind::InvalidArgument, "rewards must be finite");
  FiniteMarkovChain check_rows(transition);
}

double max_gtd_block_norm(const MarkovRewardProcess& mrp,
                          const FeatureMap& features) {
  check_features(mrp, features);
  double worst = 0.0;
  const std::size_t n = mrp.n_states();
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zn = 0; zn < n; ++zn) {
      if (!(mrp.transition(z, zn) > 0.0)) continue;
      const ProblemInstance b = pair_blocks(mrp, features, z, zn);
      worst = std::max({worst, operator_norm(b.a11), operator_norm(b.a12),
                        operator_norm(b.a21)});
    }
  return worst;
}

GtdInstance build_gtd_instance(const MarkovRewardProcess& mrp,
                               const FeatureMap& features) {
  check_features(mrp, features);
  const std::size_t n = mrp.n_states();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::vector<long>> index(n, std::vector<long>(n, -1));
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zn = 0; zn < n; ++zn)
      if (mrp.transition(z, zn) > 0.0) {
        index[z][zn] = static_cast<long>(pairs.size());
        pairs.emplace_back(z, zn);
      }

  const auto m = static_cast<Eigen::Index>(pairs.size());
  Matrix pt = Matrix::Zero(m, m);
  SampleTable table;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [z, zn] = pairs[static_cast<std::size_t>(i)];
    double row = 0.0;
    for (std::size_t z2 = 0; z2 < n; ++z2) {
      const double p = mrp.transition(zn, z2);
      if (p > 0.0) {
        pt(i, index[zn][z2]) = p;
        row += p;
      }
    }
    // Rows of P sum to 1 within 1e-12; renormalize to keep that exact.
    pt.row(i) /= row;

    ProblemInstance b = pair_blocks(mrp, features, z, zn);
    for (const Matrix* blk : {&b.a11, &b.a12, &b.a21})
      if (operator_norm(*blk) > kBlockBound + kScaleTol) {
        std::ostringstream os;
        os << "pair (" << z << ", " << zn << ") has block norm "
           << operator_norm(*blk) << " > 1/4; rescale the features";
        throw Error(ErrorKind::FeatureScale, os.str());
      }
    table.push_back(b);
  }

  FiniteMarkovChain chain(pt);
  const Vector pi = stationary_distribution(chain);
  ProblemInstance nominal = stationary_mean(table, pi);
  return GtdInstance{std::move(nominal), std::move(chain), std::move(table),
                     std::move(pairs)};
}

ScaledFeatures autoscale_features(const MarkovRewardProcess& mrp,
                                  const FeatureMap& features) {
  const double worst = max_gtd_block_norm(mrp, features);
  if (!(worst > 0.0))
    throw Error(ErrorKind::FeatureScale, "all induced blocks are zero");
  // Every matrix block is quadratic in phi.
  ScaledFeatures out;
  out.factor = std::sqrt(kBlockBound / worst);
  out.features.phi = features.phi * out.factor;
  return out;
}

BellmanSolution bellman_fixed_point(const MarkovRewardProcess& mrp,
                                    const FeatureMap& features) {
  check_features(mrp, features);
  const FiniteMarkovChain chain(mrp.transition);
  const Vector d = stationary_distribution(chain);
  const auto n = static_cast<Eigen::Index>(mrp.n_states());
  const Matrix& phi = features.phi;
  const Matrix lhs = phi.transpose() * d.asDiagonal() *
                     (Matrix::Identity(n, n) - mrp.discount * mrp.transition) * phi;
  const Vector rhs = phi.transpose() * d.asDiagonal() * mrp.reward;
  if (!(condition_number(lhs) <= kSingularCondition))
    throw Error(ErrorKind::SingularMatrix,
                "projected Bellman system is singular on the feature span");
  BellmanSolution s;
  s.y_star = lhs.partialPivLu().solve(rhs);
  s.values = phi * s.y_star;
  return s;
}

double x_star_tracking_check(const ProblemInstance& p, const ExactSolution& sol) {
  Eigen::PartialPivLU<Matrix> lu(p.a11);
  const Vector exact = lu.solve(p.b1 - p.a12 * sol.y_star);
  const Vector printed = lu.solve(p.a21.transpose() * sol.y_star + p.b1);
  return (exact - printed).norm();
}

}  // namespace ttsa
