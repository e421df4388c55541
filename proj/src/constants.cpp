#include "ttsa/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be > 0");
}

// (8 l1 + 1)^5
ExtReal lam_factor(const SpectralSummary& spec) {
  return pow(ExtReal(8.0) * ExtReal(spec.lambda1) + ExtReal(1.0), 5L);
}

}  // namespace

ExtReal compute_c2(const SpectralSummary& spec, const ExtReal& c1) {
  require_positive(spec.gamma, "gamma");
  require_positive(spec.rho, "rho");
  require_positive(spec.lambda1, "lambda1");
  const ExtReal gr = ExtReal(spec.gamma) * ExtReal(spec.rho);
  const ExtReal bb = pow(ExtReal(2.0 * spec.b_bound) + ExtReal(spec.y_star_norm), 2L);
  const ExtReal first = ExtReal(2.0) * (ExtReal(13.0) * gr + ExtReal(3.0)) * bb;
  const ExtReal second = ExtReal(9.0) * c1 * (ExtReal(3.0) + ExtReal(7.0) * gr) /
                         (ExtReal(4.0) * gr);
  ExtReal c2 = (first + second) * lam_factor(spec) / pow(ExtReal(spec.lambda1), 8L);
  c2.check("C2");
  return c2;
}

C1C2 compute_c1_c2(const SpectralSummary& spec, double alpha0, double c0,
                   double e_z0_sq) {
  require_positive(spec.gamma, "gamma");
  require_positive(spec.rho, "rho");
  require_positive(spec.lambda1, "lambda1");
  if (!(c0 >= 0.0) || !(e_z0_sq >= 0.0) || !(alpha0 >= 0.0))
    throw Error(ErrorKind::InvalidArgument,
                "C0, alpha0 and E||Z0||^2 must be nonnegative");
  const ExtReal g(spec.gamma), l1(spec.lambda1);
  const ExtReal lf = lam_factor(spec);
  const ExtReal a = pow(ExtReal(1.0) + ExtReal(alpha0), 2L);

  C1C2 out;
  out.gamma1 = ExtReal(30.0) * (g + ExtReal(1.0)) * lf * a / (g * pow(l1, 6L));
  out.gamma2 = ExtReal(38.0) * lf *
               pow(ExtReal(2.0 * spec.b_bound) + ExtReal(spec.y_star_norm), 2L) /
               pow(l1, 8L);
  const ExtReal exponent = ExtReal(2.0) * ExtReal(c0) * out.gamma1;
  out.c1 = (ExtReal(e_z0_sq) + ExtReal(c0) * out.gamma2) * exp(exponent);
  if (!out.c1.is_finite())
    throw Error(ErrorKind::Overflow,
                "C1 overflows extended precision: exponent = " +
                    exponent.to_string(17));
  out.c2 = compute_c2(spec, out.c1);
  return out;
}

ExtReal transient_bound(const SpectralSummary& spec, const StepSchedule& s,
                        std::uint64_t k_star, double v0) {
  require_positive(spec.lambda1, "lambda1");
  const double a0 = s.alpha0(), b0 = s.beta0();
  require_positive(b0, "beta0");
  const ExtReal grow =
      pow(ExtReal(1.0) + ExtReal(a0), ExtReal(2.0 * static_cast<double>(k_star)));
  const ExtReal l1(spec.lambda1);
  const ExtReal t1 = ExtReal(8.0) *
                     (ExtReal(b0) + ExtReal(spec.gamma * spec.rho) * ExtReal(a0)) *
                     grow * ExtReal(v0) / (ExtReal(b0) * pow(l1, 2L));
  const ExtReal t2 = ExtReal(25.0) *
                     pow(ExtReal(spec.b_bound) + ExtReal(spec.y_star_norm), 2L) *
                     grow / pow(l1, 6L);
  ExtReal r = t1 + t2;
  r.check("transient bound");
  return r;
}

namespace {

// 8 C1 (1+a0)^2 b0^3 / (rho g^2 l1^2 a0^2)
ExtReal c1_variance_term(const SpectralSummary& spec, double a0, double b0,
                         const ExtReal& c1) {
  return ExtReal(8.0) * c1 * pow(ExtReal(1.0) + ExtReal(a0), 2L) *
         pow(ExtReal(b0), 3L) /
         (ExtReal(spec.rho) * pow(ExtReal(spec.gamma), 2L) *
          pow(ExtReal(spec.lambda1), 2L) * pow(ExtReal(a0), 2L));
}

}  // namespace

PsiPair psi(const SpectralSummary& spec, const StepSchedule& s,
            std::uint64_t k_star, const ExtReal& c1, const ExtReal& c2,
            double c_mix) {
  require_positive(spec.lambda1, "lambda1");
  const double a0 = s.alpha0(), b0 = s.beta0();
  require_positive(a0, "alpha0");
  require_positive(b0, "beta0");
  const ExtReal ks(static_cast<double>(k_star));
  const ExtReal grow = pow(ExtReal(1.0) + ExtReal(a0), ExtReal(2.0) * ks);
  const ExtReal l1(spec.lambda1);
  PsiPair p;
  p.psi1 = ExtReal(8.0) *
           (ExtReal(b0) + ExtReal(spec.gamma * spec.rho) * ExtReal(a0)) * ks *
           grow / (ExtReal(b0) * pow(l1, 2L));
  p.psi2 = ExtReal(25.0) * ks *
               pow(ExtReal(spec.b_bound) + ExtReal(spec.y_star_norm), 2L) *
               grow / pow(l1, 6L) +
           c1_variance_term(spec, a0, b0, c1) +
           ExtReal(b0) * c2 *
               (ExtReal(a0) + ExtReal(2.0 * b0) + ExtReal(6.0 * c_mix)) /
               ExtReal(2.0);
  p.psi1.check("Psi1");
  p.psi2.check("Psi2");
  return p;
}

RateConstants rate_constants(const Experiment& exp, const MixingProfile& mix,
                             std::uint64_t c0_horizon) {
  const SpectralSummary& spec = exp.spectral();
  const StepSchedule& s = exp.schedule();
  RateConstants c;
  c.gamma = spec.gamma;
  c.rho = spec.rho;
  c.lambda1 = spec.lambda1;
  c.sigman = spec.sigman;
  c.b_bound = spec.b_bound;
  c.y_star_norm = spec.y_star_norm;
  c.alpha0 = s.alpha0();
  c.beta0 = s.beta0();
  c.c_mix = mix.c_geometric();

  const ResidualState r0 = exp.residuals(exp.x0(), exp.y0());
  c.e_z0_sq = r0.z_hat_sq;
  c.v0 = exp.lyapunov(exp.x0(), exp.y0(), 0);

  c.c0 = c0_estimate(s, mix, c0_horizon).total;
  c.k_star = k_star(s, mix).k_star;
  const C1C2 cc = compute_c1_c2(spec, c.alpha0, c.c0, c.e_z0_sq);
  c.c1 = cc.c1;
  c.c2 = cc.c2;
  c.gamma1 = cc.gamma1;
  c.gamma2 = cc.gamma2;
  c.v_kstar_bound = transient_bound(spec, s, c.k_star, c.v0);
  const PsiPair p = psi(spec, s, c.k_star, c.c1, c.c2, c.c_mix);
  c.psi1 = p.psi1;
  c.psi2 = p.psi2;
  return c;
}

ExtReal simplified_bound(const ExtReal& psi1, const ExtReal& psi2, double v0,
                         std::uint64_t k) {
  if (k == 0) return ExtReal(std::numeric_limits<double>::infinity());
  const double kd = static_cast<double>(k);
  const double k23 = std::cbrt(kd) * std::cbrt(kd);
  return psi1 * ExtReal(v0) / ExtReal(kd) + psi2 / ExtReal(k23);
}

BoundCurve theorem_bound_curve(const RateConstants& c, const StepSchedule& s,
                               std::span<const std::uint64_t> ks) {
  if (!s.is_rate_optimal())
    throw Error(ErrorKind::InvalidArgument,
                "bound curve requires alpha0/(k+1)^{2/3}, beta0/(k+1)");
  const double a0 = s.alpha0(), b0 = s.beta0();
  SpectralSummary spec;
  spec.gamma = c.gamma;
  spec.rho = c.rho;
  spec.lambda1 = c.lambda1;
  const ExtReal var_coeff =
      c1_variance_term(spec, a0, b0, c.c1) + ExtReal(1.5 * a0 * b0) * c.c2;
  const ExtReal bias = ExtReal(static_cast<double>(c.k_star)) * c.v_kstar_bound;

  BoundCurve out;
  out.ks.assign(ks.begin(), ks.end());
  for (std::uint64_t k : ks) {
    if (k == 0) {
      out.full.emplace_back(std::numeric_limits<double>::infinity());
      out.simplified.emplace_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const double n = static_cast<double>(k);
    const double l = std::log(n);
    const double n23 = std::cbrt(n) * std::cbrt(n);
    ExtReal v = bias / ExtReal(n) + var_coeff / ExtReal(n23) +
                c.c2 * ExtReal(b0 * b0 * (1.0 + l) / n) +
                c.c2 * ExtReal(3.0 * c.c_mix * b0 * l * l / n);
    out.full.push_back(std::move(v));
    out.simplified.push_back(simplified_bound(c.psi1, c.psi2, c.v0, k));
  }
  return out;
}

RecursionCheck empirical_recursion_check(const McCurve& curve,
                                         const RateConstants& c,
                                         const StepSchedule& s,
                                         const MixingProfile& mix) {
  RecursionCheck out;
  const auto& ks = curve.checkpoints;
  const bool paired = !curve.samples_v.empty();
  // 2 (1+a0)^2 / (rho g^2 l1^2)
  const ExtReal c1_coeff =
      ExtReal(2.0) * c.c1 * pow(ExtReal(1.0) + ExtReal(c.alpha0), 2L) /
      (ExtReal(c.rho) * pow(ExtReal(c.gamma), 2L) * pow(ExtReal(c.lambda1), 2L));

  for (std::size_t j = 0; j + 1 < ks.size(); ++j) {
    const std::uint64_t ka = ks[j], kb = ks[j + 1];
    if (ka < c.k_star) continue;
    // Compose t = ka .. kb-1, newest first so the weight is a running product.
    double prod = 1.0, s1 = 0.0, s2 = 0.0;
    for (std::uint64_t t = kb; t-- > ka;) {
      const auto it = static_cast<std::int64_t>(t);
      const auto [a, b] = s.at(it);
      const auto tau = static_cast<std::int64_t>(mix.tau(a));
      s1 += prod * b * b * b / (a * a);
      s2 += prod * (static_cast<double>(tau) * s.alpha.at(it - tau) * b +
                    b * b + a * b);
      prod *= std::max(0.0, 1.0 - c.rho * b);
    }

    double se;
    if (paired) {
      std::vector<double> d(curve.samples_v.size());
      for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = curve.samples_v[i][j + 1] - prod * curve.samples_v[i][j];
      se = mean_and_se(d).se;
    } else {
      se = std::hypot(prod * curve.se_v[j], curve.se_v[j + 1]);
    }

    RecursionPair p;
    p.k_from = ka;
    p.k_to = kb;
    p.lhs = curve.mean_v[j + 1];
    p.slack = 3.0 * se;
    p.rhs = ExtReal(prod * curve.mean_v[j]) + c1_coeff * ExtReal(s1) +
            c.c2 * ExtReal(s2) + ExtReal(p.slack);
    p.pass = ExtReal(p.lhs) <= p.rhs;
    out.n_pass += p.pass ? 1 : 0;
    out.pairs.push_back(std::move(p));
  }
  out.n_pairs = out.pairs.size();
  out.pass_fraction =
      out.n_pairs == 0 ? 1.0
                       : static_cast<double>(out.n_pass) / static_cast<double>(out.n_pairs);
  return out;
}

nlohmann::json to_json(const RateConstants& c) {
  auto dec = [](double v) { return ExtReal(v).to_string(17); };
  nlohmann::json j;
  j["c0"] = dec(c.c0);
  j["c1"] = c.c1.to_string(20);
  j["c2"] = c.c2.to_string(20);
  j["gamma1"] = c.gamma1.to_string(20);
  j["gamma2"] = c.gamma2.to_string(20);
  j["k_star"] = std::to_string(c.k_star);
  j["v_kstar_bound"] = c.v_kstar_bound.to_string(20);
  j["psi1"] = c.psi1.to_string(20);
  j["psi2"] = c.psi2.to_string(20);
  j["gamma"] = dec(c.gamma);
  j["rho"] = dec(c.rho);
  j["lambda1"] = dec(c.lambda1);
  j["sigman"] = dec(c.sigman);
  j["b_bound"] = dec(c.b_bound);
  j["y_star_norm"] = dec(c.y_star_norm);
  j["alpha0"] = dec(c.alpha0);
  j["beta0"] = dec(c.beta0);
  j["c_mix"] = dec(c.c_mix);
  j["e_z0_sq"] = dec(c.e_z0_sq);
  j["v0"] = dec(c.v0);
  return j;
}

}  // namespace ttsa
