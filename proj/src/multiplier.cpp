#include "gevlab/multiplier.hpp"

#include <cctype>
#include <sstream>

#include "gevlab/error.hpp"

namespace gevlab {

int PalphaPoly::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    if (!coeffs[static_cast<size_t>(k)].is_zero()) return k;
  return -1;
}

bool PalphaPoly::parity_ok() const {
  for (size_t k = 0; k < coeffs.size(); ++k)
    if ((alpha - static_cast<int>(k)) % 2 != 0 && !coeffs[k].is_zero()) return false;
  return true;
}

mpz_class a_coefficient(int m, int alpha) {
  if (m < 0 || 2 * m > alpha) throw InvalidArgument("a_{m,alpha} needs 0 <= 2m <= alpha");
  mpz_class f_alpha, f_m, f_rest;
  mpz_fac_ui(f_alpha.get_mpz_t(), static_cast<unsigned long>(alpha));
  mpz_fac_ui(f_m.get_mpz_t(), static_cast<unsigned long>(m));
  mpz_fac_ui(f_rest.get_mpz_t(), static_cast<unsigned long>(alpha - 2 * m));
  return f_alpha / (f_m * f_rest);
}

namespace {

void check_alpha(int alpha, const mpq_class& t) {
  if (alpha < 0 || alpha > 1000) throw InvalidArgument("alpha must lie in [0, 1000]");
  if (sgn(t) <= 0) throw InvalidArgument("t must be a positive rational");
}

mpq_class power(const mpq_class& q, int k) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(k));
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(k));
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

// i^k as a Gaussian rational scaled by r.
GaussianRational times_i_power(const mpq_class& r, int k) {
  switch (((k % 4) + 4) % 4) {
    case 0:
      return {r, 0};
    case 1:
      return {0, r};
    case 2:
      return {-r, 0};
    default:
      return {0, -r};
  }
}

}  // namespace

PalphaPoly p_alpha_direct(int alpha, const mpq_class& t) {
  check_alpha(alpha, t);
  PalphaPoly p;
  p.alpha = alpha;
  p.t = t;
  p.coeffs.assign(static_cast<size_t>(alpha + 1), GaussianRational{0, 0});
  // (-2it)^alpha (-4it)^{-m} = (2t)^alpha (4t)^{-m} i^{3 alpha + m}.
  const mpq_class two_t_pow = power(mpq_class(2) * t, alpha);
  for (int m = 0; 2 * m <= alpha; ++m) {
    const mpq_class mag = mpq_class(a_coefficient(m, alpha)) * two_t_pow / power(mpq_class(4) * t, m);
    p.coeffs[static_cast<size_t>(alpha - 2 * m)] = times_i_power(mag, 3 * alpha + m);
  }
  return p;
}

std::vector<PalphaPoly> p_alpha_recurrence_all(int alpha, const mpq_class& t) {
  check_alpha(alpha, t);
  std::vector<PalphaPoly> out;
  out.reserve(static_cast<size_t>(alpha + 1));
  PalphaPoly cur;
  cur.alpha = 0;
  cur.t = t;
  cur.coeffs = {GaussianRational{1, 0}};
  out.push_back(cur);
  const GaussianRational factor{0, -2 * t};
  for (int k = 0; k < alpha; ++k) {
    PalphaPoly next;
    next.alpha = k + 1;
    next.t = t;
    next.coeffs.assign(static_cast<size_t>(k + 2), GaussianRational{0, 0});
    for (size_t j = 0; j < cur.coeffs.size(); ++j) {
      next.coeffs[j + 1] = next.coeffs[j + 1] + factor * cur.coeffs[j];
      if (j > 0) next.coeffs[j - 1] = next.coeffs[j - 1] + GaussianRational{mpq_class(static_cast<long>(j)), 0} * cur.coeffs[j];
    }
    cur = std::move(next);
    out.push_back(cur);
  }
  return out;
}

PalphaPoly p_alpha_recurrence(int alpha, const mpq_class& t) { return p_alpha_recurrence_all(alpha, t).back(); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    default:
      return "inconclusive";
  }
}

WeightedSeq weighted_sequence(int alpha, double theta, mpfr_prec_t prec) {
  if (alpha < 0) throw InvalidArgument("alpha must be nonnegative");
  if (!(theta > 1)) throw InvalidArgument("theta must exceed 1");
  WeightedSeq w{alpha, theta, {}};
  for (int m = 0; 2 * m <= alpha; ++m) {
    const Interval a(mpq_class(a_coefficient(m, alpha)), prec);
    if (m == 0) {
      w.values.push_back(a);
      continue;
    }
    // alpha >= 2 here, so log(alpha) is well defined.
    const Interval e = Interval(-2.0 * m, prec) * Interval(theta, prec) * log(Interval(static_cast<long>(alpha), prec));
    w.values.push_back(a * exp(e));
  }
  return w;
}

Verdict weighted_sequence_decreasing(int alpha, double theta, mpfr_prec_t prec) {
  if (!(theta > 1)) throw InvalidArgument("theta must exceed 1");
  if (alpha < 2) return Verdict::holds;  // at most one term
  for (mpfr_prec_t p = prec; p <= 4 * prec; p *= 2) {
    // alpha^{2 theta} enclosure.
    const Interval bound = exp(Interval(2.0, p) * Interval(theta, p) * log(Interval(static_cast<long>(alpha), p)));
    bool undecided = false;
    for (int m = 0; 2 * (m + 1) <= alpha; ++m) {
      // a_{m+1}/a_m = (alpha - 2m)(alpha - 2m - 1)/(m + 1), exact.
      const mpq_class ratio(mpz_class((alpha - 2 * m)) * (alpha - 2 * m - 1), mpz_class(m + 1));
      const Interval r(ratio, p);
      if (r.certainly_less(bound)) continue;
      if (r.certainly_greater(bound) || mpfr_cmp(r.lo(), bound.hi()) >= 0) return Verdict::fails;
      undecided = true;
    }
    if (!undecided) return Verdict::holds;
  }
  return Verdict::inconclusive;
}

EvenSumResult even_partial_sum_check(int alpha, double theta, mpfr_prec_t prec) {
  if (alpha < 0) throw InvalidArgument("alpha must be nonnegative");
  if (!(theta > 1)) throw InvalidArgument("theta must exceed 1");
  const WeightedSeq w = weighted_sequence(alpha, theta, prec);
  Interval sum(0L, prec);
  for (size_t m = 0; m < w.values.size(); m += 2) {
    // (4i)^{-m} = (-1)^{m/2} 4^{-m} for even m.
    mpq_class c(1);
    mpz_class four_m;
    mpz_ui_pow_ui(four_m.get_mpz_t(), 4, m);
    c /= four_m;
    if ((m / 2) % 2 == 1) c = -c;
    sum = sum + Interval(c, prec) * w.values[m];
  }
  const Interval threshold = Interval(mpq_class(3, 4), prec) - Interval(mpq_class(1, 1) / mpq_class(mpz_class("1000000000000000000000000000000")), prec);
  const bool ok = mpfr_cmp(sum.lo(), threshold.hi()) >= 0;
  return {sum, ok};
}

Interval abs_poly_at(const PalphaPoly& p, const Interval& xi) {
  const mpfr_prec_t prec = xi.precision();
  Interval re(0L, prec), im(0L, prec), pw(1L, prec);
  for (size_t k = 0; k < p.coeffs.size(); ++k) {
    const auto& c = p.coeffs[k];
    if (sgn(c.re) != 0) re = re + Interval(c.re, prec) * pw;
    if (sgn(c.im) != 0) im = im + Interval(c.im, prec) * pw;
    pw = pw * xi;
  }
  return sqrt(sqr(re) + sqr(im));
}

namespace {

Interval xi_alpha(int alpha, const mpq_class& t, double theta, mpfr_prec_t prec) {
  const Interval la = log(Interval(static_cast<long>(alpha), prec));
  const Interval lt = log(Interval(t, prec));
  return exp(Interval(theta, prec) * la - Interval(0.5, prec) * lt);
}

}  // namespace

PacketBoundResult packet_lower_bound_check(int alpha, const mpq_class& t, double theta, mpfr_prec_t prec,
                                           mpfr_prec_t max_prec) {
  if (alpha < 1) throw InvalidArgument("packet bound needs alpha >= 1");
  if (!(theta > 1)) throw InvalidArgument("theta must exceed 1");
  const PalphaPoly poly = p_alpha_direct(alpha, t);
  PacketBoundResult out;
  for (mpfr_prec_t p = prec; p <= max_prec; p *= 2) {
    const Interval xi = xi_alpha(alpha, t, theta, p);
    if (mpfr_cmp_ui(xi.lo(), 1) < 0) throw InvalidArgument("packet bound needs t^{-1/2} alpha^theta >= 1");
    const Interval lhs = abs_poly_at(poly, xi);
    const Interval th(theta, p);
    const Interval sqrt_t = sqrt(Interval(t, p));
    const Interval expo = exp(log(Interval(mpq_class(2) / t, p)) / (Interval(2L, p) * th));
    const Interval base = Interval(2L, p) * sqrt_t * exp(-expo);
    const Interval la = log(Interval(static_cast<long>(alpha), p));
    const Interval rhs = Interval(mpq_class(3, 4), p) * exp(Interval(static_cast<long>(alpha), p) * (log(base) + th * la));
    out.lhs_lower = lhs.lower();
    out.rhs_upper = rhs.upper();
    out.precision = p;
    if (mpfr_cmp(lhs.lo(), rhs.hi()) >= 0) {
      out.verdict = Verdict::holds;
      return out;
    }
    if (lhs.certainly_less(rhs)) {
      out.verdict = Verdict::fails;
      return out;
    }
  }
  out.verdict = Verdict::inconclusive;
  return out;
}

std::string ViolationReport::csv_header() {
  return "theta,s,t,A,B,a,alpha_star,lhs_lower,rhs_upper,precision_bits";
}

std::string ViolationReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << theta << ',' << s << ',' << rational_string(t) << ',' << A << ',' << B << ',' << a << ','
     << (alpha_star ? std::to_string(*alpha_star) : std::string("none")) << ',' << lhs_lower << ',' << rhs_upper
     << ',' << precision_bits;
  return os.str();
}

ViolationReport find_violation(double theta, double s, const mpq_class& t, double A, double B, double a,
                               int alpha_max, mpfr_prec_t prec) {
  if (!(s >= 1)) throw InvalidArgument("find_violation needs s >= 1");
  if (!(s < theta)) throw InvalidArgument("find_violation needs s < theta (no violation predicted otherwise)");
  if (!(A > 0) || !(B > 0) || !(a > 0)) throw InvalidArgument("bound constants must be positive");
  if (sgn(t) <= 0) throw InvalidArgument("t must be a positive rational");
  if (alpha_max < 1 || alpha_max > 1000) throw InvalidArgument("alpha_max must lie in [1, 1000]");
  ViolationReport rep;
  rep.theta = theta;
  rep.s = s;
  rep.t = t;
  rep.A = A;
  rep.B = B;
  rep.a = a;
  rep.precision_bits = prec;
  const std::vector<PalphaPoly> polys = p_alpha_recurrence_all(alpha_max, t);
  for (int alpha = 1; alpha <= alpha_max; ++alpha) {
    for (mpfr_prec_t p = prec; p <= 4 * prec; p *= 2) {
      const Interval th(theta, p);
      const Interval xi = xi_alpha(alpha, t, theta, p);
      const Interval P = abs_poly_at(polys[static_cast<size_t>(alpha)], xi);
      const Interval lhs = P * exp(-exp(log(Interval(1L, p) + xi) / th));
      mpz_class fact;
      mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(alpha));
      const Interval log_fact = log(Interval(mpq_class(fact), p));
      const Interval k(static_cast<long>(alpha), p);
      const Interval log_rhs = log(Interval(A, p)) + k * log(Interval(2L, p) * Interval(B, p)) +
                               Interval(s, p) * log_fact - Interval(a, p) * exp(log(xi) / th);
      const Interval rhs = exp(log_rhs);
      if (lhs.certainly_greater(rhs)) {
        rep.alpha_star = alpha;
        rep.lhs_lower = lhs.lower_string();
        rep.rhs_upper = rhs.upper_string();
        rep.lhs_radius = lhs.radius();
        rep.rhs_radius = rhs.radius();
        rep.precision_bits = p;
        return rep;
      }
      if (mpfr_cmp(lhs.hi(), rhs.lo()) <= 0) break;  // certainly no violation at this alpha
    }
  }
  return rep;
}

mpq_class parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto digits = [](const std::string& s, bool allow_sign) {
    size_t i = 0;
    if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  const std::string num = text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!digits(num, true) || !digits(den, false)) throw InvalidArgument("not a rational of the form p/q: " + text);
  mpz_class n(num[0] == '+' ? num.substr(1) : num), d(den);
  if (d == 0) throw InvalidArgument("rational with zero denominator: " + text);
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

std::string rational_string(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace gevlab
