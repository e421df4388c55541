#pragma once

#include <mpfr.h>

#include <string>

namespace ttsa {

// Extended-range real backed by MPFR. The exponent range is widened to the
// library maximum so products like exp(1e12) stay representable.
class ExtReal {
 public:
  static constexpr mpfr_prec_t kPrecision = 128;

  ExtReal();
  ExtReal(double v);  // NOLINT: implicit on purpose
  ExtReal(const ExtReal& o);
  ExtReal(ExtReal&& o) noexcept;
  ExtReal& operator=(const ExtReal& o);
  ExtReal& operator=(ExtReal&& o) noexcept;
  ~ExtReal();

  // Parses a decimal string; throws InvalidArgument on failure.
  static ExtReal from_string(const std::string& s);

  ExtReal& operator+=(const ExtReal& o);
  ExtReal& operator-=(const ExtReal& o);
  ExtReal& operator*=(const ExtReal& o);
  ExtReal& operator/=(const ExtReal& o);

  friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }
  friend ExtReal operator-(ExtReal a, const ExtReal& b) { return a -= b; }
  friend ExtReal operator*(ExtReal a, const ExtReal& b) { return a *= b; }
  friend ExtReal operator/(ExtReal a, const ExtReal& b) { return a /= b; }
  ExtReal operator-() const;

  friend bool operator<(const ExtReal& a, const ExtReal& b);
  friend bool operator<=(const ExtReal& a, const ExtReal& b);
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
  friend bool operator>=(const ExtReal& a, const ExtReal& b) { return b <= a; }
  friend bool operator==(const ExtReal& a, const ExtReal& b);

  bool is_finite() const;
  bool is_zero() const;
  int sign() const;

  // Rounded to nearest; +-inf if outside the double range.
  double to_double() const;
  // Natural log as a double (finite for any positive finite value).
  double log_double() const;
  // Scientific notation with `digits` significant digits, e.g. "1.25e+3".
  std::string to_string(int digits = 20) const;

  // Throws Overflow naming `what` when the value is not finite.
  const ExtReal& check(const char* what) const;

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

ExtReal pow(const ExtReal& base, const ExtReal& exponent);
ExtReal pow(const ExtReal& base, long exponent);
ExtReal exp(const ExtReal& x);
ExtReal log(const ExtReal& x);
ExtReal sqrt(const ExtReal& x);
ExtReal max(const ExtReal& a, const ExtReal& b);
ExtReal ceil(const ExtReal& x);

}  // namespace ttsa
