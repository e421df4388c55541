#include "ttsa/engine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

void check_finite(const IterateState& st) {
  const bool ok = (st.x.array().abs() <= kDivergenceBound).all() &&
                  (st.y.array().abs() <= kDivergenceBound).all();
  if (!ok) {
    std::ostringstream os;
    os << "iterate diverged at step " << st.k;
    throw Error(ErrorKind::NonFinite, os.str());
  }
}

void check_checkpoints(std::span<const std::uint64_t> checkpoints) {
  if (checkpoints.empty())
    throw Error(ErrorKind::InvalidArgument, "checkpoint grid is empty");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] <= checkpoints[i - 1])
      throw Error(ErrorKind::InvalidArgument,
                  "checkpoints must be strictly increasing");
}

}  // namespace

void sa_step(IterateState& state, double alpha, double beta,
             const StateBlocks& b) {
  // Both drifts are evaluated before either variable moves.
  Vector gx = b.a11 * state.x + b.a12 * state.y - b.b1;
  Vector gy = b.a21 * state.x + b.a22 * state.y - b.b2;
  state.x.noalias() -= alpha * gx;
  state.y.noalias() -= beta * gy;
  ++state.k;
  check_finite(state);
}

IterateState sa_step(const IterateState& state, const StepSchedule& schedule,
                     const StateBlocks& blocks) {
  IterateState next = state;
  const auto [a, b] = schedule.at(static_cast<std::int64_t>(state.k));
  sa_step(next, a, b, blocks);
  return next;
}

MarkovNoise markov_noise(const StateBlocks& b, const ProblemInstance& p,
                         const Vector& x, const Vector& y) {
  MarkovNoise n;
  n.epsilon = (b.a11 - p.a11) * x + (b.a12 - p.a12) * y - (b.b1 - p.b1);
  n.psi = (b.a21 - p.a21) * x + (b.a22 - p.a22) * y - (b.b2 - p.b2);
  return n;
}

// ---------------------------------------------------------------------------
// Residuals and Lyapunov value

ResidualMap::ResidualMap(const ProblemInstance& p, const ExactSolution& sol)
    : y_star_(sol.y_star) {
  if (!(condition_number(p.a11) <= kSingularCondition))
    throw Error(ErrorKind::SingularMatrix, "A11 is numerically singular");
  Eigen::PartialPivLU<Matrix> lu(p.a11);
  a11_inv_b1_ = lu.solve(p.b1);
  a11_inv_a12_ = lu.solve(p.a12);
}

ResidualState ResidualMap::residuals(const Vector& x, const Vector& y) const {
  ResidualState r;
  r.x_hat = x - (a11_inv_b1_ - a11_inv_a12_ * y);
  r.y_hat = y - y_star_;
  r.z_hat_sq = r.x_hat.squaredNorm() + r.y_hat.squaredNorm();
  return r;
}

std::pair<Vector, Vector> ResidualMap::reconstruct(const ResidualState& r) const {
  Vector y = r.y_hat + y_star_;
  Vector x = r.x_hat + a11_inv_b1_ - a11_inv_a12_ * y;
  return {std::move(x), std::move(y)};
}

ResidualState residuals(const Vector& x, const Vector& y,
                        const ProblemInstance& p, const ExactSolution& sol) {
  return ResidualMap(p, sol).residuals(x, y);
}

double lyapunov_value(double x_hat_sq, double y_hat_sq, double alpha,
                      double beta, double gamma, double rho) {
  return y_hat_sq + (beta / alpha) * x_hat_sq / (2.0 * gamma * rho);
}

double lyapunov_value(const ResidualState& r, const StepSchedule& schedule,
                      std::uint64_t k, const SpectralSummary& spec) {
  const auto [a, b] = schedule.at(static_cast<std::int64_t>(k));
  return lyapunov_value(r.x_hat.squaredNorm(), r.y_hat.squaredNorm(), a, b,
                        spec.gamma, spec.rho);
}

// ---------------------------------------------------------------------------
// Experiment

Experiment::Experiment(ProblemInstance problem, FiniteMarkovChain chain,
                       SampleTable table, StepSchedule schedule, Vector x0,
                       Vector y0, ChainStart start)
    : problem_(std::move(problem)),
      chain_(std::move(chain)),
      table_(std::move(table)),
      schedule_(schedule),
      x0_(std::move(x0)),
      y0_(std::move(y0)),
      start_(start),
      pi_(stationary_distribution(chain_)),
      solution_(exact_solution(problem_)),
      spectral_(spectral_summary(problem_, table_)),
      residual_map_(problem_, solution_) {
  table_.check_shapes(problem_);
  if (table_.n_states() != chain_.n_states())
    throw Error(ErrorKind::InvalidArgument,
                "table and chain disagree on the number of states");
  if (static_cast<std::size_t>(x0_.size()) != problem_.dx() ||
      static_cast<std::size_t>(y0_.size()) != problem_.dy())
    throw Error(ErrorKind::InvalidArgument,
                "initial point does not match problem dimensions");
}

double Experiment::lyapunov(const Vector& x, const Vector& y,
                            std::uint64_t k) const {
  return lyapunov_value(residuals(x, y), schedule_, k, spectral_);
}

Experiment Experiment::with_schedule(StepSchedule s) const {
  Experiment copy = *this;
  copy.schedule_ = s;
  return copy;
}

Experiment Experiment::with_start_point(Vector x0, Vector y0) const {
  return Experiment(problem_, chain_, table_, schedule_, std::move(x0),
                    std::move(y0), start_);
}

// ---------------------------------------------------------------------------
// Trajectories

void advance(IterateState& state, SampleStream& stream,
             const StepSchedule& schedule, std::uint64_t steps) {
  for (std::uint64_t i = 0; i < steps; ++i) {
    const auto [a, b] = schedule.at(static_cast<std::int64_t>(state.k));
    const auto sample = stream.next_sample();
    sa_step(state, a, b, sample.blocks);
  }
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon,
                                                 int per_decade) {
  if (per_decade < 1)
    throw Error(ErrorKind::InvalidArgument, "per_decade must be >= 1");
  std::vector<std::uint64_t> ks{0};
  for (int j = 0;; ++j) {
    const double v =
        std::round(std::pow(10.0, static_cast<double>(j) / per_decade));
    if (v > static_cast<double>(horizon)) break;
    const auto k = static_cast<std::uint64_t>(v);
    if (k > ks.back()) ks.push_back(k);
  }
  if (horizon > ks.back()) ks.push_back(horizon);
  return ks;
}

TrajectoryRecord run_trajectory(const Experiment& exp, std::uint64_t seed,
                                std::span<const std::uint64_t> checkpoints) {
  check_checkpoints(checkpoints);
  TrajectoryRecord rec;
  rec.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  rec.x_hat_sq.reserve(checkpoints.size());
  rec.y_hat_sq.reserve(checkpoints.size());
  rec.lyapunov.reserve(checkpoints.size());

  SampleStream stream = exp.make_stream(seed);
  IterateState st{0, exp.x0(), exp.y0()};
  const SpectralSummary& spec = exp.spectral();
  for (std::uint64_t target : checkpoints) {
    advance(st, stream, exp.schedule(), target - st.k);
    const ResidualState r = exp.residuals(st.x, st.y);
    const double xs = r.x_hat.squaredNorm();
    const double ys = r.y_hat.squaredNorm();
    const auto [a, b] = exp.schedule().at(static_cast<std::int64_t>(st.k));
    rec.x_hat_sq.push_back(xs);
    rec.y_hat_sq.push_back(ys);
    rec.lyapunov.push_back(lyapunov_value(xs, ys, a, b, spec.gamma, spec.rho));
  }
  rec.final_chain_state = stream.current_state();
  rec.final_state = std::move(st);
  return rec;
}

// ---------------------------------------------------------------------------
// Monte Carlo averaging

int worker_count() {
  int n = omp_get_max_threads();
  for (const char* name : {"TTSSA_THREADS", "TTSA_THREADS"}) {
    if (const char* env = std::getenv(name)) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, cap);
    }
  }
  return std::max(n, 1);
}

double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

namespace {

using SumFn = double (*)(std::span<const double>);

double naive_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Shifted by the first sample, so identical samples give that value and a
// standard error of exactly zero.
void mean_and_se(std::span<const double> v, SumFn sum, double& mean,
                 double& se) {
  const double n = static_cast<double>(v.size());
  const double shift = v[0];
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i] - shift;
  const double dm = sum(d) / n;
  mean = shift + dm;
  if (v.size() < 2) {
    se = 0.0;
    return;
  }
  for (auto& x : d) x = (x - dm) * (x - dm);
  se = std::sqrt(sum(d) / (n - 1.0) / n);
}

}  // namespace

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe r;
  mean_and_se(values, &pairwise_sum, r.mean, r.se);
  return r;
}

namespace {

McCurve reduce(const Experiment& exp, std::span<const TrajectoryRecord> recs,
               std::span<const std::uint64_t> checkpoints, SumFn sum,
               bool keep_samples) {
  McCurve c;
  c.n_traj = recs.size();
  c.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  const std::size_t m = checkpoints.size();
  c.alpha.resize(m);
  c.beta.resize(m);
  c.mean_x.resize(m);
  c.mean_y.resize(m);
  c.mean_v.resize(m);
  c.se_x.resize(m);
  c.se_y.resize(m);
  c.se_v.resize(m);
  std::vector<double> col(recs.size());
  for (std::size_t j = 0; j < m; ++j) {
    std::tie(c.alpha[j], c.beta[j]) =
        exp.schedule().at(static_cast<std::int64_t>(checkpoints[j]));
    for (std::size_t i = 0; i < recs.size(); ++i) col[i] = recs[i].x_hat_sq[j];
    mean_and_se(col, sum, c.mean_x[j], c.se_x[j]);
    for (std::size_t i = 0; i < recs.size(); ++i) col[i] = recs[i].y_hat_sq[j];
    mean_and_se(col, sum, c.mean_y[j], c.se_y[j]);
    for (std::size_t i = 0; i < recs.size(); ++i) col[i] = recs[i].lyapunov[j];
    mean_and_se(col, sum, c.mean_v[j], c.se_v[j]);
  }
  if (keep_samples)
    for (const auto& r : recs) c.samples_v.push_back(r.lyapunov);
  return c;
}

}  // namespace

McCurve monte_carlo_mse(const Experiment& exp, std::size_t n_traj,
                        std::uint64_t base_seed,
                        std::span<const std::uint64_t> checkpoints,
                        bool keep_samples) {
  if (n_traj == 0)
    throw Error(ErrorKind::InvalidArgument, "n_traj must be >= 1");
  check_checkpoints(checkpoints);

  std::vector<TrajectoryRecord> recs(n_traj);
  std::vector<std::exception_ptr> errors(n_traj);
  const auto n = static_cast<std::int64_t>(n_traj);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      recs[i] = run_trajectory(
          exp, substream_seed(base_seed, static_cast<std::uint64_t>(i)),
          checkpoints);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "trajectory " << i << ": " << e.what();
      errors[i] = std::make_exception_ptr(Error(e.kind(), os.str()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // Lowest failing trajectory index wins, independent of scheduling.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return reduce(exp, recs, checkpoints, &pairwise_sum, keep_samples);
}

McCurve monte_carlo_mse_serial(const Experiment& exp, std::size_t n_traj,
                               std::uint64_t base_seed,
                               std::span<const std::uint64_t> checkpoints) {
  if (n_traj == 0)
    throw Error(ErrorKind::InvalidArgument, "n_traj must be >= 1");
  check_checkpoints(checkpoints);
  std::vector<TrajectoryRecord> recs;
  recs.reserve(n_traj);
  for (std::size_t i = 0; i < n_traj; ++i)
    recs.push_back(
        run_trajectory(exp, substream_seed(base_seed, i), checkpoints));
  return reduce(exp, recs, checkpoints, &naive_sum, false);
}

}  // namespace ttsa
