#include "ttsa/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

double StepFamily::at(std::int64_t k) const {
  if (kind == Kind::Constant) return scale;
  const double n = static_cast<double>(std::max<std::int64_t>(k, 0) + 1);
  if (exponent == 1.0) return scale / n;
  if (exponent == 2.0 / 3.0) {
    const double c = std::cbrt(n);
    return scale / (c * c);
  }
  return scale / std::pow(n, exponent);
}

bool StepSchedule::is_rate_optimal() const {
  return alpha.kind == StepFamily::Kind::Polynomial &&
         beta.kind == StepFamily::Kind::Polynomial &&
         std::abs(alpha.exponent - 2.0 / 3.0) < 1e-9 &&
         std::abs(beta.exponent - 1.0) < 1e-12;
}

std::string to_string(Certification c) {
  switch (c) {
    case Certification::Certified: return "certified";
    case Certification::Heuristic: return "heuristic";
    case Certification::Invalid: return "invalid";
  }
  return "invalid";
}

std::vector<std::string> summability_failures(const StepSchedule& s) {
  std::vector<std::string> out;
  const double a = s.alpha.decay();
  const double b = s.beta.decay();
  std::ostringstream os;
  if (!(s.alpha0() > 0.0) || !(s.beta0() > 0.0))
    out.push_back("step sizes must be positive");
  if (a > 1.0) out.push_back("sum of alpha_k converges (alpha exponent > 1)");
  if (b > 1.0) out.push_back("sum of beta_k converges (beta exponent > 1)");
  if (!(2.0 * a > 1.0))
    out.push_back(
        "sum of alpha_k^2 and of tau(alpha_k) alpha_{k-tau} alpha_k diverge "
        "(2a <= 1)");
  if (!(2.0 * b > 1.0)) out.push_back("sum of beta_k^2 diverges (2b <= 1)");
  if (!(2.0 * b - a > 1.0)) {
    os << "sum of beta_k^2/alpha_k diverges: terms decay like (k+1)^-"
       << (2.0 * b - a) << " (2b - a <= 1)";
    out.push_back(os.str());
  }
  return out;
}

CertificationReport validate_schedule(const StepSchedule& s,
                                      const SpectralSummary& spec) {
  CertificationReport r;
  r.reasons = summability_failures(s);
  const bool summable = r.reasons.empty();

  bool theorem_ok = true;
  const double a0 = s.alpha0();
  const double b0 = s.beta0();
  if (!(b0 >= 1.0 / spec.rho)) {
    std::ostringstream os;
    os << "beta0 = " << b0 << " < 1/rho = " << 1.0 / spec.rho;
    r.reasons.push_back(os.str());
    theorem_ok = false;
  }
  const double ratio_cap = spec.gamma / (2.0 * spec.rho);
  if (!(a0 > 0.0) || !(b0 / a0 <= ratio_cap)) {
    std::ostringstream os;
    os << "beta0/alpha0 = " << (a0 > 0.0 ? b0 / a0 : INFINITY)
       << " exceeds gamma/(2 rho) = " << ratio_cap;
    r.reasons.push_back(os.str());
    theorem_ok = false;
  }
  if (s.beta.decay() < s.alpha.decay()) {
    r.reasons.push_back("beta_k/alpha_k is increasing (b < a)");
    theorem_ok = false;
  }

  if (!summable)
    r.status = Certification::Invalid;
  else if (theorem_ok)
    r.status = Certification::Certified;
  else
    r.status = Certification::Heuristic;
  return r;
}

TauFn tau_function(const MixingProfile& mix) {
  return [&mix](double a) { return mix.tau(a); };
}

std::pair<double, double> transient_quantities(const StepSchedule& s,
                                               const MixingProfile& mix,
                                               std::uint64_t k) {
  return transient_quantities(s, tau_function(mix), k);
}

TransientIndex k_star(const StepSchedule& s, const MixingProfile& mix) {
  return k_star(s, tau_function(mix));
}

C0Estimate c0_estimate(const StepSchedule& s, const MixingProfile& mix,
                       std::uint64_t horizon) {
  return c0_estimate(s, tau_function(mix), horizon);
}

std::pair<double, double> transient_quantities(const StepSchedule& s,
                                               const TauFn& tau_of,
                                               std::uint64_t k) {
  const auto ik = static_cast<std::int64_t>(k);
  const auto tau = static_cast<std::int64_t>(tau_of(s.alpha.at(ik)));
  double window = 0.0;
  for (std::int64_t t = ik - tau; t <= ik; ++t) window += s.alpha.at(t);
  const double lagged = static_cast<double>(tau) * s.alpha.at(ik - tau);
  return {window, lagged};
}

TransientIndex k_star(const StepSchedule& s, const TauFn& tau) {
  constexpr std::uint64_t kLimit = 1'000'000'000ULL;
  const double cap = std::log(2.0);
  auto good = [&](std::uint64_t k) {
    const auto [w, l] = transient_quantities(s, tau, k);
    return w <= cap && l <= cap;
  };

  std::uint64_t k = 0;
  while (k <= kLimit) {
    if (!good(k)) {
      // A constant step never improves once the window is full.
      if (s.alpha.kind == StepFamily::Kind::Constant &&
          k > tau(s.alpha.at(0)) + 1)
        break;
      ++k;
      continue;
    }
    const std::uint64_t candidate = k;
    const std::uint64_t until = candidate + std::max<std::uint64_t>(16, candidate);
    std::uint64_t j = candidate + 1;
    while (j <= until && good(j)) ++j;
    if (j > until) {
      TransientIndex out;
      out.k_star = candidate;
      std::tie(out.window_sum, out.lagged_product) =
          transient_quantities(s, tau, candidate);
      if (candidate > 0)
        std::tie(out.prev_window_sum, out.prev_lagged_product) =
            transient_quantities(s, tau, candidate - 1);
      return out;
    }
    k = j + 1;
  }
  throw Error(ErrorKind::NotFound,
              "no transient index K* <= 1e9 satisfies both conditions");
}

C0Estimate c0_estimate(const StepSchedule& s, const TauFn& tau_of,
                       std::uint64_t horizon) {
  if (!(s.alpha0() > 0.0) || !(s.beta0() > 0.0))
    throw Error(ErrorKind::InvalidArgument,
                "step sizes must be positive to estimate C0");
  if (horizon < 16)
    throw Error(ErrorKind::InvalidArgument, "C0 horizon must be >= 16");
  const auto failures = summability_failures(s);
  if (!failures.empty())
    throw Error(ErrorKind::Diverges, "C0 series diverges: " + failures.front());

  auto terms = [&](std::uint64_t k, double out[4]) {
    const auto ik = static_cast<std::int64_t>(k);
    const double a = s.alpha.at(ik);
    const double b = s.beta.at(ik);
    const auto tau = static_cast<std::int64_t>(
        std::min<std::uint64_t>(tau_of(a), k));
    out[0] = static_cast<double>(tau) * s.alpha.at(ik - tau) * a;
    out[1] = b * b;
    out[2] = a * a;
    out[3] = b * b / a;
  };

  long double sum[4] = {0, 0, 0, 0};
  long double comp[4] = {0, 0, 0, 0};
  double t[4];
  for (std::uint64_t k = 0; k <= horizon; ++k) {
    terms(k, t);
    for (int i = 0; i < 4; ++i) {
      // Kahan summation.
      const long double y = t[i] - comp[i];
      const long double z = sum[i] + y;
      comp[i] = (z - sum[i]) - y;
      sum[i] = z;
    }
  }

  C0Estimate est;
  for (int i = 0; i < 4; ++i) {
    est.components[i] = static_cast<double>(sum[i]);
    est.partial += est.components[i];
  }

  // Tails past the horizon from the known decay exponents. With u = k + 1
  // and U = horizon + 1, sum_{u > U} u^-p ~ (U + 1/2)^{1-p}/(p-1) and
  // sum_{u > U} ln(u/U) u^-p ~ U^{1-p}/(p-1)^2.
  const double a = s.alpha.exponent, b = s.beta.exponent;
  const double big_u = static_cast<double>(horizon) + 1.0;
  auto power_tail = [&](double coeff, double p) {
    return coeff * std::pow(big_u + 0.5, 1.0 - p) / (p - 1.0);
  };
  const double a0 = s.alpha.scale, b0 = s.beta.scale;
  est.tail += power_tail(b0 * b0, 2.0 * b);
  est.tail += power_tail(a0 * a0, 2.0 * a);
  est.tail += power_tail(b0 * b0 / a0, 2.0 * b - a);

  // Mixing series: tau(alpha_k) alpha_{k-tau} alpha_k with tau growing like
  // c ln(1/alpha). Fit tau = c ln(1/alpha) + d over four decades below
  // alpha_H; the fit averages out the integer steps.
  const double alpha_h = s.alpha.at(static_cast<std::int64_t>(horizon));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  constexpr int kFit = 41;
  for (int m = 0; m < kFit; ++m) {
    const double al = alpha_h * std::pow(10.0, -0.1 * m);
    const double x = std::log(1.0 / al);
    const double y = static_cast<double>(tau_of(al));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double c = (kFit * sxy - sx * sy) / (kFit * sxx - sx * sx);
  const double d = (sy - c * sx) / kFit;
  const double tau_h = std::max(0.0, c * std::log(1.0 / alpha_h) + d);
  if (tau_h > 0.0 || c > 0.0) {
    const double p = 2.0 * a;
    est.tail += a0 * a0 * (tau_h * std::pow(big_u + 0.5, 1.0 - p) / (p - 1.0) +
                           std::max(0.0, c) * a * std::pow(big_u, 1.0 - p) /
                               ((p - 1.0) * (p - 1.0)));
  }
  est.total = est.partial + est.tail;
  return est;
}

}  // namespace ttsa
