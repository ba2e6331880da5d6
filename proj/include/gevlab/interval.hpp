#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace gevlab {

/// Closed real interval [lo, hi] with MPFR endpoints and outward rounding.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec);
  Interval(const mpq_class& q, mpfr_prec_t prec);
  Interval(double v, mpfr_prec_t prec);
  Interval(long v, mpfr_prec_t prec);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  mpfr_prec_t precision() const { return prec_; }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  double lower() const;  // rounded down
  double upper() const;  // rounded up
  /// Lower endpoint as a decimal string, rounded down (or up).
  std::string lower_string(int digits = 20) const;
  std::string upper_string(int digits = 20) const;
  /// Midpoint and radius as doubles (radius rounded up).
  double mid() const;
  double radius() const;

  bool contains_zero() const;
  /// Certified comparisons.
  bool certainly_greater(const Interval& o) const;  // lo > o.hi
  bool certainly_less(const Interval& o) const;     // hi < o.lo

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);
  Interval operator-() const;

  friend Interval exp(const Interval& a);
  friend Interval log(const Interval& a);  // requires a > 0
  friend Interval sqrt(const Interval& a);  // requires a >= 0
  friend Interval sqr(const Interval& a);
  friend Interval pow(const Interval& base, const Interval& e);  // base > 0
  friend Interval abs(const Interval& a);
  friend Interval max0(const Interval& a);  // [max(lo, 0), max(hi, 0)]

 private:
  mpfr_prec_t prec_;
  mpfr_t lo_;
  mpfr_t hi_;
};

/// Exact complex rational a + ib.
struct GaussianRational {
  mpq_class re;
  mpq_class im;

  friend GaussianRational operator+(const GaussianRational& x, const GaussianRational& y) {
    return {x.re + y.re, x.im + y.im};
  }
  friend GaussianRational operator*(const GaussianRational& x, const GaussianRational& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  friend bool operator==(const GaussianRational& x, const GaussianRational& y) {
    return x.re == y.re && x.im == y.im;
  }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

}  // namespace gevlab
