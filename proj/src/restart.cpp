#include "ttsa/restart.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include <Eigen/Dense>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

constexpr long double kMaxIters = 4611686018427387904.0L;  // 2^62

double k_two_thirds(double k) {
  const double c = std::cbrt(k);
  return c * c;
}

}  // namespace

std::string to_string(PsiSource s) {
  return s == PsiSource::Theoretical ? "theoretical-psi" : "empirical-psi";
}

void validate(const RestartConfig& cfg) {
  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_pos(cfg.delta0) || !finite_pos(cfg.epsilon))
    throw Error(ErrorKind::Config, "delta0 and epsilon must be finite and > 0");
  if (!std::isfinite(cfg.psi1) || !std::isfinite(cfg.psi2) || cfg.psi1 < 0.0 ||
      cfg.psi2 < 0.0)
    throw Error(ErrorKind::Config, "psi1 and psi2 must be finite and >= 0");
}

std::uint64_t epoch_count(const RestartConfig& cfg) {
  validate(cfg);
  std::uint64_t k = 0;
  // ldexp is exact, so Delta0/eps = 2^m gives exactly m.
  while (std::ldexp(cfg.delta0, -static_cast<int>(k)) > cfg.epsilon) ++k;
  return k;
}

std::uint64_t epoch_length(const RestartConfig& cfg, std::uint64_t k) {
  validate(cfg);
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "epoch index must be >= 1");
  const long double first = 4.0L * cfg.psi1;
  const long double ratio = static_cast<long double>(cfg.psi2) / cfg.delta0;
  // (ratio 2^{k+1})^{3/2} as y sqrt(y): exact whenever y is a perfect square.
  const long double y = std::ldexp(ratio, static_cast<int>(std::min<std::uint64_t>(k + 1, 16000)));
  const long double second = y * std::sqrt(y);
  const long double n = std::ceil(std::max(first, second));
  if (!(n <= kMaxIters)) {
    std::ostringstream os;
    os << "epoch " << k << " needs " << static_cast<double>(n)
       << " iterations (> 2^62)";
    throw Error(ErrorKind::Overflow, os.str());
  }
  return static_cast<std::uint64_t>(n);
}

RestartBudget budget_restarted(const RestartConfig& cfg) {
  RestartBudget b;
  b.epochs = epoch_count(cfg);
  long double total = 0.0L;
  for (std::uint64_t k = 1; k <= b.epochs; ++k) {
    total += static_cast<long double>(epoch_length(cfg, k));
    if (total > kMaxIters)
      throw Error(ErrorKind::Overflow, "restart budget exceeds 2^62");
  }
  b.total = static_cast<std::uint64_t>(total);
  const double kk = static_cast<double>(b.epochs);
  b.literal_bound = 4.0 * cfg.psi1 * kk +
                    std::pow(4.0 * cfg.psi2, 1.5) *
                        std::ceil(std::pow(cfg.epsilon, -1.5));
  b.literal_holds = static_cast<double>(b.total) <= b.literal_bound;
  const double r = std::pow(2.0, 1.5);
  b.rigorous_bound =
      kk * std::max(std::ceil(4.0 * cfg.psi1), 1.0) +
      r / (r - 1.0) * std::pow(4.0 * cfg.psi2 / cfg.epsilon, 1.5);
  return b;
}

PlainBudget budget_plain(double psi1, double psi2, double v0, double epsilon) {
  if (!(psi1 >= 0.0) || !(psi2 >= 0.0) || !(v0 >= 0.0) || !(epsilon > 0.0) ||
      !std::isfinite(psi1) || !std::isfinite(psi2) || !std::isfinite(v0))
    throw Error(ErrorKind::InvalidArgument,
                "budget needs finite psi1, psi2, v0 >= 0 and epsilon > 0");
  const double bias = psi1 * v0;
  // Small relative slack so exact hand cases (e.g. 0.01 + 0.08 = 0.09) are
  // not lost to rounding.
  const double target = epsilon * (1.0 + 1e-12);
  auto ok = [&](long double k) {
    const double kd = static_cast<double>(k);
    return bias / kd + psi2 / k_two_thirds(kd) <= target;
  };
  const long double hi0 = std::ceil(2.0L * bias / epsilon) +
                          std::ceil(std::pow(2.0L * psi2 / epsilon, 1.5L)) + 1.0L;
  if (!(hi0 <= kMaxIters))
    throw Error(ErrorKind::Overflow, "plain budget exceeds 2^62");
  std::uint64_t lo = 0, hi = static_cast<std::uint64_t>(hi0);
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (ok(static_cast<long double>(mid)))
      hi = mid;
    else
      lo = mid;
  }
  PlainBudget out;
  out.k = hi;
  const long double order =
      std::ceil(static_cast<long double>(v0) / epsilon) +
      std::ceil(std::pow(static_cast<long double>(epsilon), -1.5L));
  if (!(order <= kMaxIters))
    throw Error(ErrorKind::Overflow, "order-form budget exceeds 2^62");
  out.order_form = static_cast<std::uint64_t>(order);
  return out;
}

PsiFit fit_psi_surrogates(const McCurve& pilot, double v0,
                          std::uint64_t k_min) {
  std::vector<double> f1, f2, y;
  for (std::size_t j = 0; j < pilot.checkpoints.size(); ++j) {
    const std::uint64_t k = pilot.checkpoints[j];
    if (k < std::max<std::uint64_t>(k_min, 1) || !(pilot.mean_v[j] > 0.0))
      continue;
    const double kd = static_cast<double>(k);
    f1.push_back(v0 / kd);
    f2.push_back(1.0 / k_two_thirds(kd));
    y.push_back(pilot.mean_v[j]);
  }
  if (y.size() < 2)
    throw Error(ErrorKind::InsufficientData,
                "need at least 2 positive pilot points to fit psi");

  // Relative residuals: rows divided by the observation.
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = f1[i] / y[i];
    a(i, 1) = f2[i] / y[i];
  }
  auto sse = [&](double p1, double p2) {
    return (a * Eigen::Vector2d(p1, p2) - ones).squaredNorm();
  };
  // Two-variable NNLS by enumerating active sets.
  double best_p1 = 0.0, best_p2 = 0.0, best = sse(0.0, 0.0);
  const Eigen::Vector2d full = a.colPivHouseholderQr().solve(ones);
  if (full(0) >= 0.0 && full(1) >= 0.0 && sse(full(0), full(1)) < best) {
    best_p1 = full(0);
    best_p2 = full(1);
    best = sse(best_p1, best_p2);
  }
  for (int c = 0; c < 2; ++c) {
    const double den = a.col(c).squaredNorm();
    if (!(den > 0.0)) continue;
    const double p = std::max(0.0, a.col(c).dot(ones) / den);
    const double p1 = c == 0 ? p : 0.0, p2 = c == 1 ? p : 0.0;
    if (sse(p1, p2) < best) {
      best = sse(p1, p2);
      best_p1 = p1;
      best_p2 = p2;
    }
  }
  if (best_p1 == 0.0 && best_p2 == 0.0)
    throw Error(ErrorKind::NonPositive, "psi fit collapsed to zero");

  PsiFit fit;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double model = best_p1 * f1[i] + best_p2 * f2[i];
    fit.envelope = std::max(fit.envelope, y[i] / model);
  }
  fit.psi1 = best_p1 * fit.envelope;
  fit.psi2 = best_p2 * fit.envelope;
  return fit;
}

PsiFit fit_psi_from_pilot(const Experiment& exp, std::size_t n_traj,
                          std::uint64_t horizon, std::uint64_t seed) {
  const auto grid = geometric_checkpoints(horizon);
  const McCurve pilot = monte_carlo_mse(exp, n_traj, seed, grid);
  return fit_psi_surrogates(pilot, exp.lyapunov(exp.x0(), exp.y0(), 0));
}

ReplicaRun run_restarted_replica(const Experiment& exp,
                                 const RestartConfig& cfg, std::uint64_t seed) {
  const std::uint64_t epochs = epoch_count(cfg);
  if (epochs > cfg.max_epochs) {
    std::ostringstream os;
    os << epochs << " epochs needed, max_epochs = " << cfg.max_epochs;
    throw Error(ErrorKind::BudgetExceeded, os.str());
  }
  ReplicaRun run;
  SampleStream stream = exp.make_stream(seed);
  run.final_state = IterateState{0, exp.x0(), exp.y0()};
  IterateState& st = run.final_state;
  for (std::uint64_t e = 1; e <= epochs; ++e) {
    const std::uint64_t n = epoch_length(cfg, e);
    st.k = 0;
    advance(st, stream, exp.schedule(), n);
    run.v_end.push_back(exp.lyapunov(st.x, st.y, n));
  }
  return run;
}

RestartLog run_restarted(const Experiment& exp, const RestartConfig& cfg,
                         std::size_t n_replicas, std::uint64_t base_seed) {
  if (n_replicas == 0)
    throw Error(ErrorKind::InvalidArgument, "n_replicas must be >= 1");
  const std::uint64_t epochs = epoch_count(cfg);
  if (epochs > cfg.max_epochs) {
    std::ostringstream os;
    os << epochs << " epochs needed, max_epochs = " << cfg.max_epochs;
    throw Error(ErrorKind::BudgetExceeded, os.str());
  }
  // Fail on infeasible lengths before any work is done.
  std::vector<std::uint64_t> lengths;
  for (std::uint64_t e = 1; e <= epochs; ++e)
    lengths.push_back(epoch_length(cfg, e));

  std::vector<ReplicaRun> runs(n_replicas);
  std::vector<std::exception_ptr> errors(n_replicas);
  const auto n = static_cast<std::int64_t>(n_replicas);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      runs[i] = run_restarted_replica(
          exp, cfg, substream_seed(base_seed, static_cast<std::uint64_t>(i)));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "replica " << i << ": " << e.what();
      errors[i] = std::make_exception_ptr(Error(e.kind(), os.str()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  RestartLog log;
  log.source = cfg.source;
  log.n_replicas = n_replicas;
  EpochRecord first;
  first.delta_target = cfg.delta0;
  const double v0 = exp.lyapunov(exp.x0(), exp.y0(), 0);
  first.v_estimate = v0;  // deterministic start
  log.epochs.push_back(first);

  std::vector<double> col(n_replicas);
  std::uint64_t cumulative = 0;
  for (std::uint64_t e = 1; e <= epochs; ++e) {
    EpochRecord rec;
    rec.epoch = e;
    rec.n_k = lengths[e - 1];
    cumulative += rec.n_k;
    rec.cumulative_iters = cumulative;
    rec.delta_target = std::ldexp(cfg.delta0, -static_cast<int>(e));
    for (std::size_t i = 0; i < n_replicas; ++i) col[i] = runs[i].v_end[e - 1];
    const MeanSe m = mean_and_se(col);
    rec.v_estimate = m.mean;
    rec.v_se = m.se;
    log.epochs.push_back(rec);
  }
  return log;
}

}  // namespace ttsa
