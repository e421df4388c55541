#include "ttsa/bigfloat.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

// Done once before the first value is created.
struct RangeInit {
  RangeInit() {
    mpfr_set_emax(mpfr_get_emax_max());
    mpfr_set_emin(mpfr_get_emin_min());
  }
};

void ensure_range() { static RangeInit init; }

}  // namespace

ExtReal::ExtReal() {
  ensure_range();
  mpfr_init2(v_, kPrecision);
  mpfr_set_zero(v_, 1);
}

ExtReal::ExtReal(double v) {
  ensure_range();
  mpfr_init2(v_, kPrecision);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

ExtReal::ExtReal(const ExtReal& o) {
  mpfr_init2(v_, kPrecision);
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

ExtReal::ExtReal(ExtReal&& o) noexcept {
  mpfr_init2(v_, kPrecision);
  mpfr_swap(v_, o.v_);
}

ExtReal& ExtReal::operator=(const ExtReal& o) {
  if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
  return *this;
}

ExtReal& ExtReal::operator=(ExtReal&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

ExtReal::~ExtReal() { mpfr_clear(v_); }

ExtReal ExtReal::from_string(const std::string& s) {
  ExtReal r;
  char* end = nullptr;
  mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end == s.c_str() || *end != '\0')
    throw Error(ErrorKind::InvalidArgument, "not a decimal number: " + s);
  return r;
}

ExtReal& ExtReal::operator+=(const ExtReal& o) {
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
ExtReal& ExtReal::operator-=(const ExtReal& o) {
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
ExtReal& ExtReal::operator*=(const ExtReal& o) {
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
ExtReal& ExtReal::operator/=(const ExtReal& o) {
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

ExtReal ExtReal::operator-() const {
  ExtReal r;
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

bool operator<(const ExtReal& a, const ExtReal& b) {
  return mpfr_less_p(a.v_, b.v_) != 0;
}
bool operator<=(const ExtReal& a, const ExtReal& b) {
  return mpfr_lessequal_p(a.v_, b.v_) != 0;
}
bool operator==(const ExtReal& a, const ExtReal& b) {
  return mpfr_equal_p(a.v_, b.v_) != 0;
}

bool ExtReal::is_finite() const { return mpfr_number_p(v_) != 0; }
bool ExtReal::is_zero() const { return mpfr_zero_p(v_) != 0; }
int ExtReal::sign() const { return mpfr_sgn(v_); }

double ExtReal::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

double ExtReal::log_double() const {
  ExtReal l = ttsa::log(*this);
  return l.to_double();
}

std::string ExtReal::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  char* buf = nullptr;
  const std::string fmt = "%." + std::to_string(digits - 1) + "Re";
  if (mpfr_asprintf(&buf, fmt.c_str(), v_) < 0)
    throw Error(ErrorKind::Overflow, "cannot format extended value");
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

const ExtReal& ExtReal::check(const char* what) const {
  if (!is_finite())
    throw Error(ErrorKind::Overflow,
                std::string(what) + " is not representable even in extended "
                                    "precision");
  return *this;
}

ExtReal pow(const ExtReal& base, const ExtReal& exponent) {
  ExtReal r;
  mpfr_pow(r.get(), base.get(), exponent.get(), MPFR_RNDN);
  return r;
}

ExtReal pow(const ExtReal& base, long exponent) {
  ExtReal r;
  mpfr_pow_si(r.get(), base.get(), exponent, MPFR_RNDN);
  return r;
}

ExtReal exp(const ExtReal& x) {
  ExtReal r;
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}

ExtReal log(const ExtReal& x) {
  ExtReal r;
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

ExtReal sqrt(const ExtReal& x) {
  ExtReal r;
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

ExtReal ceil(const ExtReal& x) {
  ExtReal r;
  mpfr_ceil(r.get(), x.get());
  return r;
}

}  // namespace ttsa
