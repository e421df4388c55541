// Acceptance suite: one PASS/FAIL line per criterion A1..A9.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "ttsa/constants.hpp"
#include "ttsa/engine.hpp"
#include "ttsa/error.hpp"
#include "ttsa/fit.hpp"
#include "ttsa/gtd.hpp"
#include "ttsa/io.hpp"
#include "ttsa/restart.hpp"
#include "ttsa/schedule.hpp"

using namespace ttsa;

namespace {

int failures = 0;

void report(const char* id, bool pass, const std::string& detail, double seconds) {
  std::printf("%s %s  %s  [%.2fs]\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

// Runs one criterion, timing it and turning exceptions into failures.
void criterion(const char* id, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, pass, detail, s);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct P1Run {
  ExperimentConfig cfg;
  McCurve curve;
  std::string csv;
};

P1Run run_p1() {
  P1Run r{load_config(std::string(TTSA_CONFIG_DIR) + "/p1.json"), {}, {}};
  const Experiment e = r.cfg.experiment();
  r.curve = monte_carlo_mse(e, r.cfg.n_traj, r.cfg.seed, r.cfg.checkpoint_grid(), true);
  std::ostringstream os;
  write_curve_csv(os, r.curve);
  r.csv = os.str();
  return r;
}

// Deviation of the two-state spread table by explicit 2x2 matrix powers.
std::uint64_t tau_oracle(const SampleTable& t, const Matrix& p, double alpha) {
  const double pi0 = p(1, 0) / (p(0, 1) + p(1, 0));
  std::vector<double> dev;
  double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  for (int k = 0; k < 500; ++k) {
    double d = 0;
    auto upd = [&](double v0, double v1) {
      const double mean = pi0 * v0 + (1 - pi0) * v1;
      d = std::max({d, std::abs(m00 * v0 + m01 * v1 - mean), std::abs(m10 * v0 + m11 * v1 - mean)});
    };
    upd(t.a11[0](0, 0), t.a11[1](0, 0));
    upd(t.a12[0](0, 0), t.a12[1](0, 0));
    upd(t.a21[0](0, 0), t.a21[1](0, 0));
    upd(t.a22[0](0, 0), t.a22[1](0, 0));
    upd(t.b1[0](0), t.b1[1](0));
    upd(t.b2[0](0), t.b2[1](0));
    dev.push_back(d);
    const double n00 = m00 * p(0, 0) + m01 * p(1, 0), n01 = m00 * p(0, 1) + m01 * p(1, 1);
    const double n10 = m10 * p(0, 0) + m11 * p(1, 0), n11 = m10 * p(0, 1) + m11 * p(1, 1);
    m00 = n00, m01 = n01, m10 = n10, m11 = n11;
  }
  std::uint64_t k = dev.size();
  while (k > 0 && dev[k - 1] <= alpha) --k;
  return k;
}

std::uint64_t kstar_scan(double a0, std::int64_t tau) {
  auto alpha = [&](std::int64_t t) {
    return a0 / std::pow(double(std::max<std::int64_t>(t, 0) + 1), 2.0 / 3.0);
  };
  auto good = [&](std::int64_t k) {
    double w = 0;
    for (std::int64_t t = k - tau; t <= k; ++t) w += alpha(t);
    return w <= std::log(2.0) && tau * alpha(k - tau) <= std::log(2.0);
  };
  for (std::int64_t k = 0;; ++k) {
    bool all = true;
    for (std::int64_t j = k; j <= 4 * k + 200 && all; ++j) all = good(j);
    if (all) return static_cast<std::uint64_t>(k);
  }
}

}  // namespace

int main() {
  P1Run a1;

  criterion("A1", [&](std::string& d) {
    a1 = run_p1();
    std::vector<double> ks(a1.curve.checkpoints.begin(), a1.curve.checkpoints.end());
    const RateFit f = fit_rate(ks, a1.curve.mean_v, 1e3, 1e5);
    d = "slope " + fmt("%.4f", f.slope) + " in [-0.90, -0.45], r2 " + fmt("%.4f", f.r_squared) +
        ", " + std::to_string(a1.cfg.n_traj) + " trajectories";
    return f.slope >= -0.90 && f.slope <= -0.45;
  });

  criterion("A2", [&](std::string& d) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> off(-0.05, 0.05), diag(0.15, 0.25), any(-0.25, 0.25);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      const int dx = 1 + t % 4, dy = 1 + (t / 4) % 3;
      auto fill = [&](int r, int c, bool dom) {
        Matrix m(r, c);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < c; ++j) m(i, j) = dom && i == j ? diag(rng) : off(rng);
        return m;
      };
      Vector b1(dx), b2(dy);
      for (auto& v : b1) v = any(rng);
      for (auto& v : b2) v = any(rng);
      const ProblemInstance p(fill(dx, dx, true), fill(dx, dy, false), fill(dy, dx, false),
                              fill(dy, dy, true), b1, b2);
      const ExactSolution s = exact_solution(p);
      worst = std::max(worst, relative_residual(p, s.x_star, s.y_star));
    }
    d = "worst relative residual " + fmt("%.3g", worst) + " <= 1e-10";
    return worst <= 1e-10;
  });

  criterion("A3", [&](std::string& d) {
    const ProblemInstance p = ProblemInstance::scalar(0.25, 0.1, -0.1, 0.25, 0.5, 0.25);
    const Experiment e(p, FiniteMarkovChain::single_state(), SampleTable::noiseless(p),
                       StepSchedule::rate_optimal(8.2, 3.5), Vector::Zero(1), Vector::Zero(1));
    const std::vector<std::uint64_t> g{0, 100000};
    const TrajectoryRecord r = run_trajectory(e, 1, g);
    const double z0 = r.x_hat_sq[0] + r.y_hat_sq[0], z1 = r.x_hat_sq[1] + r.y_hat_sq[1];
    d = "|Z|^2 ratio " + fmt("%.3g", z1 / z0) + " <= 1e-4";
    return z1 <= 1e-4 * z0;
  });

  criterion("A4", [&](std::string& d) {
    const MarkovRewardProcess m{Matrix::Ones(1, 1), Vector::Ones(1), 0.9};
    const FeatureMap phi{Matrix::Constant(1, 1, 0.5)};
    const GtdInstance g = build_gtd_instance(m, phi);
    const ExactSolution sol = exact_solution(g.problem);
    const BellmanSolution b = bellman_fixed_point(m, phi);
    const bool exact = std::abs(sol.y_star(0) - 20) <= 1e-10 && std::abs(b.y_star(0) - 20) <= 1e-10 &&
                       std::abs(0.5 * sol.y_star(0) - 10) <= 1e-10 && std::abs(b.values(0) - 10) <= 1e-10;
    const StepSchedule s = StepSchedule::rate_optimal(12.0, 420.0);
    const Experiment e(g.problem, g.chain, g.table, s, Vector::Zero(1), Vector::Zero(1));
    const std::vector<std::uint64_t> grid{0, 100000};
    std::vector<double> vals;
    for (std::uint64_t i = 0; i < 100; ++i)
      vals.push_back(0.5 * run_trajectory(e, substream_seed(4, i), grid).final_state.y(0));
    const double mean = mean_and_se(vals).mean;
    d = "Y* " + fmt("%.12g", sol.y_star(0)) + " / Bellman " + fmt("%.12g", b.y_star(0)) +
        ", mean phi*Y at 1e5 = " + fmt("%.6f", mean) + " (within 5% of 10)";
    return exact && std::abs(mean - 10.0) <= 0.5;
  });

  criterion("A5", [&](std::string& d) {
    const Experiment e = a1.cfg.experiment();
    const MixingProfile mix(e.chain(), e.table());
    const RateConstants c = rate_constants(e, mix);
    const RecursionCheck theory = empirical_recursion_check(a1.curve, c, e.schedule(), mix);
    RateConstants zero = c;
    zero.c1 = ExtReal(0.0);
    zero.c2 = ExtReal(0.0);
    const RecursionCheck control = empirical_recursion_check(a1.curve, zero, e.schedule(), mix);
    d = "theoretical pass " + fmt("%.4f", theory.pass_fraction) + " (C1 ~ 1e" +
        fmt("%.0f", c.c1.log_double() / std::log(10.0)) + "), zero-constant control pass " +
        fmt("%.4f", control.pass_fraction) + " over " + std::to_string(control.n_pairs) +
        " pairs (needs < 1)";
    return theory.pass_fraction == 1.0 && control.pass_fraction < 1.0;
  });

  criterion("A6", [&](std::string& d) {
    const ExperimentConfig cfg = load_config(std::string(TTSA_CONFIG_DIR) + "/p1.json");
    const Experiment e = cfg.experiment();
    const PsiFit fit = fit_psi_from_pilot(e, cfg.restart.pilot_traj, cfg.restart.pilot_horizon,
                                          substream_seed(cfg.seed, 0xFFFFFFFFULL));
    RestartConfig rc;
    rc.delta0 = e.lyapunov(e.x0(), e.y0(), 0);
    rc.epsilon = rc.delta0 / 64.0;
    rc.psi1 = fit.psi1;
    rc.psi2 = fit.psi2;
    rc.source = PsiSource::Empirical;
    const RestartLog log = run_restarted(e, rc, 100, cfg.seed);
    bool ok = log.epochs.size() == 7;
    double worst = -INFINITY;
    for (std::size_t k = 1; k < log.epochs.size(); ++k) {
      const auto& r = log.epochs[k];
      worst = std::max(worst, (r.v_estimate - 3 * r.v_se) / r.delta_target);
      ok = ok && r.v_estimate <= r.delta_target + 3 * r.v_se;
    }
    d = "psi1 " + fmt("%.4g", fit.psi1) + ", psi2 " + fmt("%.4g", fit.psi2) + ", " +
        std::to_string(log.epochs.size() - 1) + " epochs, " +
        std::to_string(log.epochs.back().cumulative_iters) +
        " iterations, max (V - 3SE)/Delta_k = " + fmt("%.3f", worst);
    return ok;
  });

  criterion("A7", [&](std::string& d) {
    double prev = 0;
    bool increasing = true;
    for (int j = 3; j <= 12; ++j) {
      const double eps = std::ldexp(1.0, -j);
      RestartConfig rc;
      rc.delta0 = 1.0;
      rc.epsilon = eps;
      rc.psi1 = 10.0;
      rc.psi2 = 0.0;
      const double ratio = double(budget_plain(10.0, 0.0, 1.0, eps).k) /
                           double(budget_restarted(rc).total);
      increasing = increasing && ratio > prev;
      prev = ratio;
    }
    d = "ratio at j = 12: " + fmt("%.2f", prev) + " (> 50, strictly increasing)";
    return increasing && prev > 50.0;
  });

  criterion("A8", [&](std::string& d) {
    Matrix p(2, 2);
    p << 0.9, 0.1, 0.2, 0.8;
    const FiniteMarkovChain chain(p);
    const ProblemInstance p1 = ProblemInstance::scalar(0.25, 0.1, -0.1, 0.25, 0.5, 0.25);
    const SampleTable t = make_spread_table(p1, chain, 0.1);
    const MixingProfile mix(chain, t);
    bool match = mix.tau(0.001) == 12;
    for (double a = 0.05; a > 1e-12; a /= 1.3) match = match && mix.tau(a) == tau_oracle(t, p, a);
    const double target = 1.0 / std::log(1.0 / 0.7);
    const double c = mix.c_geometric();
    const auto ks = k_star(StepSchedule::rate_optimal(0.1, 0.1), [](double) -> std::uint64_t { return 12; });
    const std::uint64_t oracle = kstar_scan(0.1, 12);
    d = "tau(0.001) = " + std::to_string(mix.tau(0.001)) + ", C = " + fmt("%.4f", c) +
        " vs " + fmt("%.4f", target) + ", K* = " + std::to_string(ks.k_star) + " (scan " +
        std::to_string(oracle) + ")";
    return match && std::abs(c - target) <= 0.15 * target && ks.k_star == 14 && oracle == 14;
  });

  criterion("A9", [&](std::string& d) {
    const P1Run again = run_p1();
    d = "repeat of A1 with seed " + std::to_string(a1.cfg.seed) + ": " +
        std::to_string(again.csv.size()) + " bytes, " +
        (again.csv == a1.csv ? "identical" : "different");
    return !a1.csv.empty() && again.csv == a1.csv;
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
