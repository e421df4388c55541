#include "ttsa/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::Config, msg);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) config_error(std::string(what) + " must be a number");
  return j.get<double>();
}

std::uint64_t count(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    config_error(std::string(what) + " must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) config_error(std::string(where) + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key))
      config_error(std::string("unknown key '") + key + "' in " + where);
}

const Json& require(const Json& j, const char* key, const char* where) {
  if (!j.contains(key))
    config_error(std::string("missing '") + key + "' in " + where);
  return j.at(key);
}

// Inline object, or a path string resolved against base.
Json inline_or_file(const Json& j, const fs::path& base, const char* what) {
  if (j.is_object()) return j;
  if (!j.is_string())
    config_error(std::string(what) + " must be an object or a file path");
  fs::path p = j.get<std::string>();
  if (p.is_relative()) p = base / p;
  return read_json_file(p);
}

// Rethrows library validation failures as configuration errors.
template <class F>
auto as_config(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument)
      config_error(std::string(what) + ": " + e.what());
    throw;
  }
}

}  // namespace

Matrix matrix_from_json(const Json& j, const char* what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty())
    config_error(std::string(what) + " must be a number or nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) config_error(std::string(what) + " rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      config_error(std::string(what) + " is ragged");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) config_error(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

ProblemInstance problem_from_json(const Json& j) {
  check_keys(j, {"a11", "a12", "a21", "a22", "b1", "b2"}, "problem");
  return as_config("problem", [&] {
    return ProblemInstance(matrix_from_json(require(j, "a11", "problem"), "a11"),
                           matrix_from_json(require(j, "a12", "problem"), "a12"),
                           matrix_from_json(require(j, "a21", "problem"), "a21"),
                           matrix_from_json(require(j, "a22", "problem"), "a22"),
                           vector_from_json(require(j, "b1", "problem"), "b1"),
                           vector_from_json(require(j, "b2", "problem"), "b2"));
  });
}

ChainAndTable chain_from_json(const Json& j) {
  check_keys(j, {"transition", "states"}, "chain");
  return as_config("chain", [&] {
    FiniteMarkovChain chain(
        matrix_from_json(require(j, "transition", "chain"), "transition"));
    const Json& states = require(j, "states", "chain");
    if (!states.is_array() || states.size() != chain.n_states())
      config_error("chain 'states' must list one block set per state");
    SampleTable table;
    for (const Json& s : states) table.push_back(problem_from_json(s));
    return ChainAndTable{std::move(chain), std::move(table)};
  });
}

namespace {

StepFamily family_from_json(const Json& j, const char* scale_key,
                            const char* where) {
  if (!j.is_object()) config_error(std::string(where) + " must be an object");
  if (j.contains("constant")) {
    check_keys(j, {"constant"}, where);
    return StepFamily::constant(number(j.at("constant"), where));
  }
  check_keys(j, {scale_key, "exp"}, where);
  const double scale = number(require(j, scale_key, where), scale_key);
  double e = number(require(j, "exp", where), "exp");
  // 0.6667 and friends mean 2/3 exactly.
  if (std::abs(e - 2.0 / 3.0) < 1e-3) e = 2.0 / 3.0;
  if (!(scale > 0.0) || !(e > 0.0) || !(e <= 1.0))
    config_error(std::string(where) + " needs scale > 0 and exponent in (0, 1]");
  return StepFamily::polynomial(scale, e);
}

Json family_to_json(const StepFamily& f, const char* scale_key) {
  if (f.kind == StepFamily::Kind::Constant) return Json{{"constant", f.scale}};
  return Json{{scale_key, f.scale}, {"exp", f.exponent}};
}

}  // namespace

StepSchedule schedule_from_json(const Json& j) {
  check_keys(j, {"alpha", "beta"}, "schedule");
  return {family_from_json(require(j, "alpha", "schedule"), "a0", "alpha"),
          family_from_json(require(j, "beta", "schedule"), "b0", "beta")};
}

Json to_json(const StepSchedule& s) {
  return Json{{"alpha", family_to_json(s.alpha, "a0")},
              {"beta", family_to_json(s.beta, "b0")}};
}

MrpWithFeatures mrp_from_json(const Json& j) {
  check_keys(j, {"transition", "reward", "discount", "features"}, "gtd");
  return as_config("gtd", [&] {
    MrpWithFeatures m;
    m.mrp.transition = matrix_from_json(require(j, "transition", "gtd"), "transition");
    m.mrp.reward = vector_from_json(require(j, "reward", "gtd"), "reward");
    m.mrp.discount = number(require(j, "discount", "gtd"), "discount");
    m.features.phi = matrix_from_json(require(j, "features", "gtd"), "features");
    m.mrp.check();
    return m;
  });
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
}

std::vector<std::uint64_t> ExperimentConfig::checkpoint_grid() const {
  if (checkpoints.empty()) return geometric_checkpoints(horizon, per_decade);
  return checkpoints;
}

Experiment ExperimentConfig::experiment() const {
  return Experiment(problem, chain, table, schedule, x0, y0, start);
}

ExperimentConfig config_from_json(const Json& j, const fs::path& base) {
  check_keys(j,
             {"problem", "gtd", "autoscale", "chain", "noise", "schedule", "x0",
              "y0", "start", "horizon", "per_decade", "checkpoints", "n_traj",
              "seed", "mode", "sweep", "window", "restart", "out"},
             "config");
  ExperimentConfig c;

  const int sources = static_cast<int>(j.contains("problem")) +
                      static_cast<int>(j.contains("gtd"));
  if (sources != 1) config_error("config needs exactly one of 'problem', 'gtd'");
  if (j.contains("gtd")) {
    if (j.contains("chain") || j.contains("noise"))
      config_error("'gtd' builds its own chain; drop 'chain' and 'noise'");
    MrpWithFeatures m = mrp_from_json(inline_or_file(j.at("gtd"), base, "gtd"));
    if (j.value("autoscale", false))
      m.features = autoscale_features(m.mrp, m.features).features;
    GtdInstance g = build_gtd_instance(m.mrp, m.features);
    c.problem = std::move(g.problem);
    c.chain = std::move(g.chain);
    c.table = std::move(g.table);
    c.from_gtd = true;
  } else {
    c.problem = problem_from_json(inline_or_file(j.at("problem"), base, "problem"));
    if (j.contains("chain") && j.contains("noise"))
      config_error("give at most one of 'chain', 'noise'");
    if (j.contains("chain")) {
      ChainAndTable ct = chain_from_json(inline_or_file(j.at("chain"), base, "chain"));
      c.chain = std::move(ct.chain);
      c.table = std::move(ct.table);
    } else if (j.contains("noise")) {
      const Json& n = j.at("noise");
      check_keys(n, {"transition", "spread"}, "noise");
      c.chain = as_config("noise", [&] {
        return FiniteMarkovChain(
            matrix_from_json(require(n, "transition", "noise"), "transition"));
      });
      const double spread = number(require(n, "spread", "noise"), "spread");
      if (!(spread >= 0.0)) config_error("noise spread must be >= 0");
      c.table = make_spread_table(c.problem, c.chain, spread);
    } else {
      c.table = SampleTable::noiseless(c.problem);
    }
  }

  c.schedule = schedule_from_json(require(j, "schedule", "config"));
  c.x0 = j.contains("x0") ? vector_from_json(j.at("x0"), "x0")
                          : Vector::Zero(static_cast<Eigen::Index>(c.problem.dx()));
  c.y0 = j.contains("y0") ? vector_from_json(j.at("y0"), "y0")
                          : Vector::Zero(static_cast<Eigen::Index>(c.problem.dy()));
  if (static_cast<std::size_t>(c.x0.size()) != c.problem.dx() ||
      static_cast<std::size_t>(c.y0.size()) != c.problem.dy())
    config_error("x0 / y0 do not match the problem dimensions");

  if (j.contains("start")) {
    const Json& s = j.at("start");
    if (s.is_string() && s.get<std::string>() == "stationary")
      c.start = ChainStart::stationary();
    else if (s.is_number_integer() && s.get<long long>() >= 0 &&
             s.get<std::size_t>() < c.chain.n_states())
      c.start = ChainStart::state(s.get<std::size_t>());
    else
      config_error("'start' must be \"stationary\" or a valid state index");
  }

  if (j.contains("horizon")) c.horizon = count(j.at("horizon"), "horizon");
  if (j.contains("per_decade")) {
    c.per_decade = static_cast<int>(count(j.at("per_decade"), "per_decade"));
    if (c.per_decade < 1) config_error("per_decade must be >= 1");
  }
  if (j.contains("checkpoints")) {
    const Json& cp = j.at("checkpoints");
    if (!cp.is_array() || cp.empty()) config_error("'checkpoints' must be a non-empty array");
    for (const Json& k : cp) c.checkpoints.push_back(count(k, "checkpoint"));
    for (std::size_t i = 1; i < c.checkpoints.size(); ++i)
      if (c.checkpoints[i] <= c.checkpoints[i - 1])
        config_error("checkpoints must be strictly increasing");
    if (c.checkpoints.back() > c.horizon)
      config_error("horizon must be >= the largest checkpoint");
  }
  if (j.contains("n_traj")) c.n_traj = count(j.at("n_traj"), "n_traj");
  if (c.n_traj < 1) config_error("n_traj must be >= 1");
  if (j.contains("seed")) c.seed = count(j.at("seed"), "seed");

  if (j.contains("mode")) {
    const std::string m = j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
    if (m == "plain")
      c.mode = RunMode::Plain;
    else if (m == "restart")
      c.mode = RunMode::Restart;
    else if (m == "sweep")
      c.mode = RunMode::Sweep;
    else
      config_error("mode must be plain, restart or sweep");
  }
  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    if (!s.is_array() || s.empty()) config_error("'sweep' must be a non-empty array");
    c.sweep_exponents.clear();
    for (const Json& e : s) {
      const double v = number(e, "sweep exponent");
      if (!(v > 0.5 && v < 1.0)) config_error("sweep exponents must lie in (1/2, 1)");
      c.sweep_exponents.push_back(v);
    }
  }
  if (j.contains("window")) {
    const Json& w = j.at("window");
    if (!w.is_array() || w.size() != 2) config_error("'window' must be [lo, hi]");
    c.window_lo = number(w[0], "window");
    c.window_hi = number(w[1], "window");
    if (!(c.window_lo > 0.0 && c.window_lo < c.window_hi))
      config_error("window needs 0 < lo < hi");
  }
  if (j.contains("restart")) {
    const Json& r = j.at("restart");
    check_keys(r,
               {"delta0", "ratio", "psi1", "psi2", "pilot_traj", "pilot_horizon",
                "max_epochs"},
               "restart");
    RestartSettings& s = c.restart;
    if (r.contains("delta0")) s.delta0 = number(r.at("delta0"), "delta0");
    if (r.contains("ratio")) s.ratio = number(r.at("ratio"), "ratio");
    if (r.contains("psi1")) s.psi1 = number(r.at("psi1"), "psi1");
    if (r.contains("psi2")) s.psi2 = number(r.at("psi2"), "psi2");
    if (s.psi1.has_value() != s.psi2.has_value())
      config_error("give both psi1 and psi2, or neither");
    if (r.contains("pilot_traj")) s.pilot_traj = count(r.at("pilot_traj"), "pilot_traj");
    if (r.contains("pilot_horizon"))
      s.pilot_horizon = count(r.at("pilot_horizon"), "pilot_horizon");
    if (r.contains("max_epochs")) s.max_epochs = count(r.at("max_epochs"), "max_epochs");
    if (!(s.ratio > 0.0)) config_error("restart ratio must be > 0");
  }
  if (j.contains("out")) {
    if (!j.at("out").is_string()) config_error("'out' must be a path");
    c.out = j.at("out").get<std::string>();
  }
  as_config("config", [&] {
    c.table.check_shapes(c.problem);
    return 0;
  });
  if (c.table.n_states() != c.chain.n_states())
    config_error("table and chain disagree on the number of states");
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve_csv(std::ostream& os, const McCurve& c) {
  os << "k,alpha_k,beta_k,mse_x,mse_y,lyapunov,se_lyapunov\n";
  for (std::size_t j = 0; j < c.checkpoints.size(); ++j)
    os << c.checkpoints[j] << ',' << format_double(c.alpha[j]) << ','
       << format_double(c.beta[j]) << ',' << format_double(c.mean_x[j]) << ','
       << format_double(c.mean_y[j]) << ',' << format_double(c.mean_v[j]) << ','
       << format_double(c.se_v[j]) << '\n';
}

void write_epoch_csv(std::ostream& os, const RestartLog& log) {
  os << "epoch,n_k,cumulative_iters,v_estimate,v_se,delta_target\n";
  for (const EpochRecord& e : log.epochs)
    os << e.epoch << ',' << e.n_k << ',' << e.cumulative_iters << ','
       << format_double(e.v_estimate) << ',' << format_double(e.v_se) << ','
       << format_double(e.delta_target) << '\n';
}

const std::vector<double>& CsvColumns::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  config_error("CSV has no column '" + name + "'");
}

CsvColumns read_csv(std::istream& is) {
  CsvColumns out;
  std::string line;
  if (!std::getline(is, line)) config_error("CSV is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.header.push_back(cell);
  }
  out.columns.resize(out.header.size());
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= out.header.size()) config_error("CSV row " + std::to_string(row) + " is too long");
      try {
        std::size_t used = 0;
        out.columns[col].push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        config_error("CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
      ++col;
    }
    if (col != out.header.size())
      config_error("CSV row " + std::to_string(row) + " is too short");
  }
  return out;
}

}  // namespace ttsa
