#include "gevlab/interval.hpp"

#include <algorithm>
#include <vector>

#include "gevlab/error.hpp"

namespace gevlab {

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const mpq_class& q, mpfr_prec_t prec) : Interval(prec) {
  mpfr_set_q(lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, q.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(double v, mpfr_prec_t prec) : Interval(prec) {
  mpfr_set_d(lo_, v, MPFR_RNDD);
  mpfr_set_d(hi_, v, MPFR_RNDU);
}

Interval::Interval(long v, mpfr_prec_t prec) : Interval(prec) {
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}

Interval::Interval(const Interval& o) : Interval(o.prec_) {
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept : Interval(o.prec_) {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this != &o) {
    mpfr_set_prec(lo_, o.prec_);
    mpfr_set_prec(hi_, o.prec_);
    prec_ = o.prec_;
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  if (this != &o) {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    std::swap(prec_, o.prec_);
  }
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

double Interval::lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

namespace {

std::string to_string(mpfr_srcptr v, int digits, mpfr_rnd_t rnd) {
  std::vector<char> buf(static_cast<size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), rnd == MPFR_RNDD ? "%.*RDe" : "%.*RUe", digits, v);
  return buf.data();
}

}  // namespace

std::string Interval::lower_string(int digits) const { return to_string(lo_, digits, MPFR_RNDD); }
std::string Interval::upper_string(int digits) const { return to_string(hi_, digits, MPFR_RNDU); }

double Interval::mid() const {
  mpfr_t m;
  mpfr_init2(m, prec_ + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  const double d = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return d;
}

double Interval::radius() const {
  mpfr_t r;
  mpfr_init2(r, prec_);
  mpfr_sub(r, hi_, lo_, MPFR_RNDU);
  mpfr_div_2ui(r, r, 1, MPFR_RNDU);
  const double d = mpfr_get_d(r, MPFR_RNDU);
  mpfr_clear(r);
  return d;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool Interval::certainly_greater(const Interval& o) const { return mpfr_greater_p(lo_, o.hi_) != 0; }
bool Interval::certainly_less(const Interval& o) const { return mpfr_less_p(hi_, o.lo_) != 0; }

namespace {

mpfr_prec_t joint(const Interval& a, const Interval& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(joint(a, b));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const {
  Interval r(prec_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  const mpfr_prec_t p = joint(a, b);
  Interval r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  mpfr_srcptr ea[2] = {a.lo_, a.hi_};
  mpfr_srcptr eb[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : ea)
    for (auto y : eb) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw NumericalError("interval division by an interval containing zero");
  const mpfr_prec_t p = joint(a, b);
  Interval r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  mpfr_srcptr ea[2] = {a.lo_, a.hi_};
  mpfr_srcptr eb[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : ea)
    for (auto y : eb) {
      mpfr_div(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

Interval exp(const Interval& a) {
  Interval r(a.prec_);
  mpfr_exp(r.lo_, a.lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval log(const Interval& a) {
  if (mpfr_sgn(a.lo_) <= 0) throw NumericalError("interval log of a nonpositive interval");
  Interval r(a.prec_);
  mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
  mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval sqrt(const Interval& a) {
  if (mpfr_sgn(a.lo_) < 0) throw NumericalError("interval sqrt of a negative interval");
  Interval r(a.prec_);
  mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
  mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval abs(const Interval& a) {
  if (mpfr_sgn(a.lo_) >= 0) return a;
  if (mpfr_sgn(a.hi_) <= 0) return -a;
  Interval r(a.prec_);
  mpfr_set_zero(r.lo_, 1);
  mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
  if (mpfr_greater_p(a.hi_, r.hi_)) mpfr_set(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval sqr(const Interval& a) {
  const Interval m = abs(a);
  Interval r(a.prec_);
  mpfr_sqr(r.lo_, m.lo_, MPFR_RNDD);
  mpfr_sqr(r.hi_, m.hi_, MPFR_RNDU);
  return r;
}

Interval max0(const Interval& a) {
  Interval r = a;
  if (mpfr_sgn(r.lo_) < 0) mpfr_set_zero(r.lo_, 1);
  if (mpfr_sgn(r.hi_) < 0) mpfr_set_zero(r.hi_, 1);
  return r;
}

Interval pow(const Interval& base, const Interval& e) { return exp(e * log(base)); }

}  // namespace gevlab
