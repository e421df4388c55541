#include "ttsa/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

// ---------------------------------------------------------------------------
// FiniteMarkovChain

FiniteMarkovChain::FiniteMarkovChain(Matrix transition)
    : transition_(std::move(transition)) {
  const Eigen::Index n = transition_.rows();
  if (n == 0 || transition_.cols() != n)
    throw Error(ErrorKind::InvalidArgument,
                "transition matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = transition_(i, j);
      if (!std::isfinite(p) || p < 0.0) {
        std::ostringstream os;
        os << "transition entry (" << i << "," << j << ") = " << p
           << " is not a probability";
        throw Error(ErrorKind::InvalidArgument, os.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "transition row " << i << " sums to " << sum;
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
  cdf_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += transition_(i, j);
      cdf_(i, j) = acc;
    }
    // Rounding in the last partial sum must never leave a gap above it.
    cdf_(i, n - 1) = std::numeric_limits<double>::infinity();
  }
}

FiniteMarkovChain FiniteMarkovChain::single_state() {
  return FiniteMarkovChain(Matrix::Ones(1, 1));
}

bool FiniteMarkovChain::is_ergodic() const {
  const Eigen::Index n = transition_.rows();
  Matrix pattern = (transition_.array() > 0.0).cast<double>().matrix();
  // A primitive matrix has P^m > 0 for every m >= (n-1)^2 + 1, and a
  // non-primitive one never does, so squaring past n^2 decides it.
  const std::uint64_t target = static_cast<std::uint64_t>(n) * n;
  std::uint64_t power = 1;
  while (power < target) {
    pattern = ((pattern * pattern).array() > 0.0).cast<double>().matrix();
    power *= 2;
  }
  return (pattern.array() > 0.0).all();
}

Vector stationary_distribution(const FiniteMarkovChain& chain) {
  if (!chain.is_ergodic())
    throw Error(ErrorKind::NotErgodic,
                "chain is not irreducible and aperiodic");
  const Eigen::Index n = static_cast<Eigen::Index>(chain.n_states());
  Matrix system = chain.transition().transpose() - Matrix::Identity(n, n);
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Vector pi = system.fullPivLu().solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
  pi /= pi.sum();
  return pi;
}

// ---------------------------------------------------------------------------
// SampleTable

void SampleTable::push_back(const ProblemInstance& blocks) {
  a11.push_back(blocks.a11);
  a12.push_back(blocks.a12);
  a21.push_back(blocks.a21);
  a22.push_back(blocks.a22);
  b1.push_back(blocks.b1);
  b2.push_back(blocks.b2);
}

void SampleTable::check_shapes(const ProblemInstance& p) const {
  const std::size_t n = a11.size();
  if (a12.size() != n || a21.size() != n || a22.size() != n ||
      b1.size() != n || b2.size() != n || n == 0)
    throw Error(ErrorKind::InvalidArgument,
                "sample table block lists have inconsistent lengths");
  auto same = [](const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols();
  };
  for (std::size_t s = 0; s < n; ++s) {
    if (!same(a11[s], p.a11) || !same(a12[s], p.a12) ||
        !same(a21[s], p.a21) || !same(a22[s], p.a22) ||
        b1[s].size() != p.b1.size() || b2[s].size() != p.b2.size()) {
      std::ostringstream os;
      os << "sample table state " << s << " does not match problem shapes";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
}

SampleTable SampleTable::noiseless(const ProblemInstance& p) {
  SampleTable t;
  t.push_back(p);
  return t;
}

ProblemInstance stationary_mean(const SampleTable& table, const Vector& pi) {
  const std::size_t n = table.n_states();
  if (n == 0 || static_cast<std::size_t>(pi.size()) != n)
    throw Error(ErrorKind::InvalidArgument,
                "stationary distribution length does not match table");
  Matrix a11 = Matrix::Zero(table.a11[0].rows(), table.a11[0].cols());
  Matrix a12 = Matrix::Zero(table.a12[0].rows(), table.a12[0].cols());
  Matrix a21 = Matrix::Zero(table.a21[0].rows(), table.a21[0].cols());
  Matrix a22 = Matrix::Zero(table.a22[0].rows(), table.a22[0].cols());
  Vector b1 = Vector::Zero(table.b1[0].size());
  Vector b2 = Vector::Zero(table.b2[0].size());
  for (std::size_t s = 0; s < n; ++s) {
    const double w = pi(static_cast<Eigen::Index>(s));
    a11 += w * table.a11[s];
    a12 += w * table.a12[s];
    a21 += w * table.a21[s];
    a22 += w * table.a22[s];
    b1 += w * table.b1[s];
    b2 += w * table.b2[s];
  }
  return ProblemInstance(a11, a12, a21, a22, b1, b2);
}

SampleTable make_spread_table(const ProblemInstance& nominal,
                              const FiniteMarkovChain& chain, double spread) {
  if (!(spread >= 0.0) || !std::isfinite(spread))
    throw Error(ErrorKind::InvalidArgument, "spread must be finite and >= 0");
  const Vector pi = stationary_distribution(chain);

  auto matrix_amplitude = [spread](const Matrix& m) {
    return std::min(spread, std::max(0.0, 0.25 - operator_norm(m)));
  };
  auto matrix_pattern = [](const Matrix& m) {
    return Matrix::Constant(m.rows(), m.cols(),
                            1.0 / std::sqrt(static_cast<double>(m.size())));
  };
  auto vector_pattern = [](const Vector& v) {
    return Vector::Constant(v.size(),
                            1.0 / std::sqrt(static_cast<double>(v.size())));
  };

  const double h11 = matrix_amplitude(nominal.a11);
  const double h12 = matrix_amplitude(nominal.a12);
  const double h21 = matrix_amplitude(nominal.a21);
  const double h22 = matrix_amplitude(nominal.a22);

  SampleTable table;
  for (std::size_t s = 0; s < chain.n_states(); ++s) {
    const double c = (s == 0 ? 1.0 : 0.0) - pi(0);
    table.a11.push_back(nominal.a11 + h11 * c * matrix_pattern(nominal.a11));
    table.a12.push_back(nominal.a12 + h12 * c * matrix_pattern(nominal.a12));
    table.a21.push_back(nominal.a21 + h21 * c * matrix_pattern(nominal.a21));
    table.a22.push_back(nominal.a22 + h22 * c * matrix_pattern(nominal.a22));
    table.b1.push_back(nominal.b1 + spread * c * vector_pattern(nominal.b1));
    table.b2.push_back(nominal.b2 + spread * c * vector_pattern(nominal.b2));
  }
  return table;
}

// ---------------------------------------------------------------------------
// MixingProfile

MixingProfile::MixingProfile(const FiniteMarkovChain& chain,
                             const SampleTable& table)
    : MixingProfile(chain, table, Options{}) {}

MixingProfile::MixingProfile(const FiniteMarkovChain& chain,
                             const SampleTable& table, Options options) {
  const std::size_t n = chain.n_states();
  if (table.n_states() != n)
    throw Error(ErrorKind::InvalidArgument,
                "table and chain disagree on the number of states");
  const Vector pi = stationary_distribution(chain);
  const ProblemInstance mean = stationary_mean(table, pi);

  // Centered blocks, one list per block kind.
  std::vector<std::vector<Matrix>> centered(6);
  for (std::size_t s = 0; s < n; ++s) {
    centered[0].push_back(table.a11[s] - mean.a11);
    centered[1].push_back(table.a12[s] - mean.a12);
    centered[2].push_back(table.a21[s] - mean.a21);
    centered[3].push_back(table.a22[s] - mean.a22);
    centered[4].push_back(table.b1[s] - mean.b1);
    centered[5].push_back(table.b2[s] - mean.b2);
  }

  const Eigen::Index en = static_cast<Eigen::Index>(n);
  Matrix power = Matrix::Identity(en, en);
  for (std::size_t k = 0;; ++k) {
    double dev = 0.0;
    double tv = 0.0;
    for (Eigen::Index s = 0; s < en; ++s) {
      for (const auto& blocks : centered) {
        Matrix cond = Matrix::Zero(blocks[0].rows(), blocks[0].cols());
        for (Eigen::Index j = 0; j < en; ++j)
          if (power(s, j) != 0.0) cond += power(s, j) * blocks[j];
        dev = std::max(dev, operator_norm(cond));
      }
      tv = std::max(tv, 0.5 * (power.row(s).transpose() - pi).cwiseAbs().sum());
    }
    deviation_.push_back(dev);
    tv_.push_back(tv);
    if (dev <= options.floor || k + 1 >= options.max_steps) break;
    power = power * chain.transition();
  }

  tail_max_.resize(deviation_.size());
  double running = 0.0;
  for (std::size_t i = deviation_.size(); i-- > 0;) {
    running = std::max(running, deviation_[i]);
    tail_max_[i] = running;
  }

  const std::size_t last = deviation_.size() - 1;
  if (deviation_[last] > 0.0 && last > 0) {
    const std::size_t m = std::min<std::size_t>(10, last);
    const double prev = deviation_[last - m];
    if (prev > 0.0)
      decay_rate_ = std::pow(deviation_[last] / prev, 1.0 / static_cast<double>(m));
  }

  try {
    c_geometric_ = fit_geometric_constant(*this).c;
  } catch (const Error&) {
    c_geometric_ = 0.0;
  }
}

std::uint64_t MixingProfile::tau(double alpha) const {
  if (!(alpha > 0.0))
    throw Error(ErrorKind::InvalidArgument, "mixing tolerance must be > 0");
  if (alpha >= tail_max_.front()) return 0;
  if (alpha >= tail_max_.back()) {
    // tail_max_ is nonincreasing.
    auto it = std::partition_point(tail_max_.begin(), tail_max_.end(),
                                   [alpha](double d) { return d > alpha; });
    return static_cast<std::uint64_t>(it - tail_max_.begin());
  }
  // Below the computed horizon: extrapolate the geometric decay.
  if (!(decay_rate_ > 0.0 && decay_rate_ < 1.0))
    throw Error(ErrorKind::NotFound,
                "mixing tolerance below the computed deviation horizon");
  const std::size_t last = deviation_.size() - 1;
  const double extra =
      std::ceil(std::log(alpha / deviation_[last]) / std::log(decay_rate_));
  return static_cast<std::uint64_t>(last) +
         static_cast<std::uint64_t>(std::max(0.0, extra));
}

std::uint64_t mixing_time(const FiniteMarkovChain& chain,
                          const SampleTable& table, double alpha) {
  if (!(alpha > 0.0))
    throw Error(ErrorKind::InvalidArgument, "mixing tolerance must be > 0");
  MixingProfile::Options opt;
  opt.floor = std::min(opt.floor, alpha * 1e-3);
  return MixingProfile(chain, table, opt).tau(alpha);
}

GeometricFit fit_geometric_constant(std::span<const double> alphas,
                                    std::span<const double> taus) {
  if (alphas.size() != taus.size())
    throw Error(ErrorKind::InvalidArgument, "alpha/tau lengths differ");
  if (alphas.size() < 5)
    throw Error(ErrorKind::InsufficientData,
                "need at least 5 (alpha, tau) pairs");
  const auto [lo, hi] = std::minmax_element(alphas.begin(), alphas.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12))
    throw Error(ErrorKind::InsufficientData,
                "alpha values must be positive and span two decades");

  const std::size_t n = alphas.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::log(1.0 / alphas[i]);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(taus.begin(), taus.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (taus[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  GeometricFit fit;
  fit.c = sxy / sxx;
  fit.intercept = my - fit.c * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = taus[i] - fit.c * x[i];
    ss += r * r;
  }
  fit.relative_residual = my > 0.0 ? std::sqrt(ss / n) / my : 0.0;
  return fit;
}

GeometricFit fit_geometric_constant(const MixingProfile& profile) {
  const double top = profile.deviation().empty()
                         ? 0.0
                         : *std::max_element(profile.deviation().begin(),
                                             profile.deviation().end());
  if (!(top > 0.0))
    throw Error(ErrorKind::InsufficientData,
                "chain has no block deviation to fit");
  // Six decades below the initial deviation, 25 points.
  constexpr int kPoints = 25;
  std::vector<double> alphas, taus;
  for (int i = 0; i < kPoints; ++i) {
    const double a = 0.5 * top * std::pow(10.0, -6.0 * i / (kPoints - 1));
    alphas.push_back(a);
    taus.push_back(static_cast<double>(profile.tau(a)));
  }
  return fit_geometric_constant(alphas, taus);
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) + index);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SampleStream::SampleStream(const FiniteMarkovChain& chain,
                           const SampleTable& table, std::uint64_t seed,
                           ChainStart start, const Vector& pi)
    : chain_(&chain), table_(&table), rng_(seed) {
  const std::size_t n = chain.n_states();
  if (table.n_states() != n)
    throw Error(ErrorKind::InvalidArgument,
                "table and chain disagree on the number of states");
  if (start.fixed_state) {
    if (*start.fixed_state >= n)
      throw Error(ErrorKind::InvalidArgument, "initial state out of range");
    state_ = *start.fixed_state;
  } else {
    if (static_cast<std::size_t>(pi.size()) != n)
      throw Error(ErrorKind::InvalidArgument,
                  "stationary distribution length does not match chain");
    const double u = uniform01(rng_);
    double acc = 0.0;
    state_ = n - 1;
    for (std::size_t s = 0; s + 1 < n; ++s) {
      acc += pi(static_cast<Eigen::Index>(s));
      if (u < acc) {
        state_ = s;
        break;
      }
    }
  }
}

SampleStream::Sample SampleStream::next_sample() {
  const double u = uniform01(rng_);
  const Matrix& cdf = chain_->row_cdf();
  const Eigen::Index row = static_cast<Eigen::Index>(state_);
  Eigen::Index j = 0;
  while (u >= cdf(row, j)) ++j;
  state_ = static_cast<std::size_t>(j);
  ++k_;
  return {state_, table_->blocks(state_)};
}

}  // namespace ttsa
