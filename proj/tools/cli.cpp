#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ttsa/assumptions.hpp"
#include "ttsa/constants.hpp"
#include "ttsa/error.hpp"
#include "ttsa/fit.hpp"
#include "ttsa/io.hpp"
#include "ttsa/restart.hpp"

namespace ttsa::cli {

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed, traj, horizon;
  std::string out;
  std::string window;
  std::string in;
  std::string column = "lyapunov";
  std::uint64_t c0_horizon = 10'000'000;
};

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::pair<double, double> parse_window(const std::string& w) {
  const auto colon = w.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorKind::Config, "--window expects LO:HI");
  try {
    const double lo = std::stod(w.substr(0, colon));
    const double hi = std::stod(w.substr(colon + 1));
    if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument(w);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Config, "--window expects LO:HI with 0 < LO < HI");
  }
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.traj) {
    if (*o.traj < 1) throw Error(ErrorKind::Config, "--traj must be >= 1");
    c.n_traj = *o.traj;
  }
  if (o.horizon) {
    c.horizon = *o.horizon;
    if (!c.checkpoints.empty() && c.checkpoints.back() > c.horizon)
      throw Error(ErrorKind::Config, "--horizon is below the largest checkpoint");
  }
  if (!o.window.empty()) std::tie(c.window_lo, c.window_hi) = parse_window(o.window);
  if (!o.out.empty()) c.out = o.out;
  return c;
}

// Writes `body` to the configured path, or to `out` when none is set.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& body) {
  if (path.empty()) {
    body(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
  body(f);
}

Json spectral_json(const SpectralSummary& s) {
  return Json{{"gamma", s.gamma},           {"rho", s.rho},
              {"lambda1", s.lambda1},       {"lambdan", s.lambdan},
              {"sigma1", s.sigma1},         {"sigman", s.sigman},
              {"b_bound", s.b_bound},       {"y_star_norm", s.y_star_norm}};
}

Json fit_json(const RateFit& f, double lo, double hi) {
  return Json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"r_squared", f.r_squared},
              {"n_points", f.n_points},
              {"window", {lo, hi}}};
}

RateFit fit_curve(const McCurve& c, double lo, double hi) {
  std::vector<double> ks(c.checkpoints.begin(), c.checkpoints.end());
  return fit_rate(ks, c.mean_v, lo, hi);
}

// solve: exact solution, spectral summary and assumption report. Accepts
// either a full experiment config or a bare problem document.
int cmd_solve(const Options& o, std::ostream& out) {
  const Json j = read_json_file(o.config);
  ProblemInstance p;
  FiniteMarkovChain chain = FiniteMarkovChain::single_state();
  SampleTable table;
  if (j.is_object() && j.contains("a11")) {
    p = problem_from_json(j);
    table = SampleTable::noiseless(p);
  } else {
    ExperimentConfig c = config_from_json(j, std::filesystem::path(o.config).parent_path());
    p = c.problem;
    chain = c.chain;
    table = c.table;
  }
  const ExactSolution sol = exact_solution(p);
  Json r;
  r["x_star"] = vec_json(sol.x_star);
  r["y_star"] = vec_json(sol.y_star);
  r["relative_residual"] = relative_residual(p, sol.x_star, sol.y_star);
  const AssumptionReport a = validate_assumptions(p, chain, table);
  r["assumptions"] = Json{{"ok", a.ok()},
                          {"bounded_ok", a.bounded_ok},
                          {"worst_block_norm", a.worst_block_norm},
                          {"positivity_ok", a.positivity_ok},
                          {"a11_positive", a.a11_positive},
                          {"delta_positive", a.delta_positive},
                          {"stationary_ok", a.stationary_ok},
                          {"details", a.details}};
  try {
    r["spectral"] = spectral_json(spectral_summary(p, table));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotPositive) throw;
    r["spectral"] = Json{{"error", e.what()}};
  }
  out << r.dump(2) << '\n';
  return 0;
}

// validate: certification, K* and (for certified schedules) the constants.
int cmd_validate(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const Experiment exp = c.experiment();
  const CertificationReport cert = validate_schedule(c.schedule, exp.spectral());
  Json r;
  r["schedule"] = to_json(c.schedule);
  r["certification"] = to_string(cert.status);
  r["reasons"] = cert.reasons;
  r["spectral"] = spectral_json(exp.spectral());
  if (cert.status != Certification::Invalid) {
    const MixingProfile mix(c.chain, c.table);
    const TransientIndex ks = k_star(c.schedule, mix);
    r["k_star"] = ks.k_star;
    r["k_star_witness"] = {ks.window_sum, ks.lagged_product, ks.prev_window_sum,
                           ks.prev_lagged_product};
    r["c_mix"] = mix.c_geometric();
    if (cert.status == Certification::Certified)
      r["constants"] = to_json(rate_constants(exp, mix, o.c0_horizon));
  }
  out << r.dump(2) << '\n';
  return 0;
}

int cmd_run(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const Experiment exp = c.experiment();
  const auto grid = c.checkpoint_grid();
  const McCurve curve = monte_carlo_mse(exp, c.n_traj, c.seed, grid);
  emit(c.out, out, [&](std::ostream& os) { write_curve_csv(os, curve); });
  if (!c.out.empty()) {
    Json r;
    r["csv"] = c.out;
    r["n_traj"] = c.n_traj;
    r["seed"] = c.seed;
    r["start"] = c.start.fixed_state ? Json(*c.start.fixed_state) : Json("stationary");
    r["certification"] = to_string(validate_schedule(c.schedule, exp.spectral()).status);
    try {
      r["fit"] = fit_json(fit_curve(curve, c.window_lo, c.window_hi), c.window_lo,
                          c.window_hi);
    } catch (const Error& e) {
      r["fit"] = Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    }
    out << r.dump(2) << '\n';
  }
  return 0;
}

int cmd_restart(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const Experiment exp = c.experiment();
  const RestartSettings& s = c.restart;
  RestartConfig cfg;
  cfg.delta0 = s.delta0 ? *s.delta0 : exp.lyapunov(exp.x0(), exp.y0(), 0);
  cfg.epsilon = cfg.delta0 / s.ratio;
  cfg.max_epochs = s.max_epochs;
  double envelope = 1.0;
  if (s.psi1) {
    cfg.psi1 = *s.psi1;
    cfg.psi2 = *s.psi2;
    cfg.source = PsiSource::Theoretical;
  } else {
    const PsiFit fit = fit_psi_from_pilot(exp, s.pilot_traj, s.pilot_horizon,
                                          substream_seed(c.seed, 0xFFFFFFFFULL));
    cfg.psi1 = fit.psi1;
    cfg.psi2 = fit.psi2;
    envelope = fit.envelope;
    cfg.source = PsiSource::Empirical;
  }
  const RestartLog log = run_restarted(exp, cfg, c.n_traj, c.seed);
  emit(c.out, out, [&](std::ostream& os) { write_epoch_csv(os, log); });
  if (!c.out.empty()) {
    const RestartBudget b = budget_restarted(cfg);
    Json r;
    r["csv"] = c.out;
    r["psi_source"] = to_string(cfg.source);
    r["psi1"] = cfg.psi1;
    r["psi2"] = cfg.psi2;
    r["envelope"] = envelope;
    r["delta0"] = cfg.delta0;
    r["epsilon"] = cfg.epsilon;
    r["epochs"] = b.epochs;
    r["total_iterations"] = b.total;
    r["literal_bound"] = b.literal_bound;
    r["literal_bound_holds"] = b.literal_holds;
    r["rigorous_bound"] = b.rigorous_bound;
    out << r.dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const Experiment base = c.experiment();
  const auto grid = c.checkpoint_grid();
  std::ostringstream table;
  table << "s,slope,intercept,r_squared,certification\n";
  for (double s : c.sweep_exponents) {
    const StepSchedule sch{StepFamily::polynomial(c.schedule.alpha0(), s),
                           StepFamily::polynomial(c.schedule.beta0(), 1.0)};
    const Experiment exp = base.with_schedule(sch);
    const McCurve curve = monte_carlo_mse(exp, c.n_traj, c.seed, grid);
    const RateFit f = fit_curve(curve, c.window_lo, c.window_hi);
    table << format_double(s) << ',' << format_double(f.slope) << ','
          << format_double(f.intercept) << ',' << format_double(f.r_squared) << ','
          << to_string(validate_schedule(sch, exp.spectral()).status) << '\n';
  }
  emit(c.out, out, [&](std::ostream& os) { os << table.str(); });
  return 0;
}

int cmd_rate_fit(const Options& o, std::ostream& out) {
  std::ifstream in(o.in);
  if (!in) throw Error(ErrorKind::Config, "cannot open " + o.in);
  const CsvColumns csv = read_csv(in);
  const auto [lo, hi] = o.window.empty() ? std::pair{1e3, 1e5} : parse_window(o.window);
  const RateFit f = fit_rate(csv.column("k"), csv.column(o.column), lo, hi);
  out << Json{{"fit", fit_json(f, lo, hi)}}.dump(2) << '\n';
  return 0;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& msg) {
  err << Json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Two-time-scale stochastic approximation experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--traj", o.traj, "Number of trajectories / replicas");
    sub->add_option("--horizon", o.horizon, "Last iteration");
    sub->add_option("--out", o.out, "Output CSV path");
    sub->add_option("--window", o.window, "Fit window LO:HI");
  };

  auto* solve = app.add_subcommand("solve", "Exact solution and assumption report");
  solve->add_option("--config", o.config, "Problem or experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* validate = app.add_subcommand("validate", "Schedule certification and constants");
  add_common(validate);
  validate->add_option("--c0-horizon", o.c0_horizon, "Partial-sum length for C0");
  auto* run = app.add_subcommand("run", "Monte Carlo error curve to CSV");
  add_common(run);
  auto* restart = app.add_subcommand("restart", "Restarted method, epoch log to CSV");
  add_common(restart);
  auto* sweep = app.add_subcommand("sweep", "Rate slopes over alpha exponents");
  add_common(sweep);
  auto* rate_fit = app.add_subcommand("rate-fit", "Log-log slope of a curve CSV");
  rate_fit->add_option("--in", o.in, "Curve CSV")->required();
  rate_fit->add_option("--window", o.window, "Fit window LO:HI");
  rate_fit->add_option("--column", o.column, "Value column (default lyapunov)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json(err, "UsageError", e.what());
    return kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*validate) return cmd_validate(o, out);
    if (*run) return cmd_run(o, out);
    if (*restart) return cmd_restart(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*rate_fit) return cmd_rate_fit(o, out);
  } catch (const Error& e) {
    error_json(err, std::string(to_string(e.kind())), e.what());
    return is_numerical(e.kind()) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    error_json(err, "InternalError", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace ttsa::cli
