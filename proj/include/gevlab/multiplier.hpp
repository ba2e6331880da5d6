#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gevlab/interval.hpp"

namespace gevlab {

/// P_alpha(xi) with d^alpha/dxi^alpha e^{-it xi^2} = P_alpha(xi) e^{-it xi^2};
/// coeffs[k] multiplies xi^k.
struct PalphaPoly {
  int alpha = 0;
  mpq_class t;
  std::vector<GaussianRational> coeffs;

  int degree() const;
  /// Only powers with alpha - power even carry nonzero coefficients.
  bool parity_ok() const;
  friend bool operator==(const PalphaPoly& a, const PalphaPoly& b) { return a.alpha == b.alpha && a.t == b.t && a.coeffs == b.coeffs; }
};

/// a_{m,alpha} = alpha! / (m! (alpha - 2m)!).
mpz_class a_coefficient(int m, int alpha);

/// Closed-form sum over m of (-2it xi)^alpha (-4it)^{-m} a_{m,alpha} xi^{-2m}.
PalphaPoly p_alpha_direct(int alpha, const mpq_class& t);

/// P_0 = 1, P_{k+1} = -2it xi P_k + P_k'.
PalphaPoly p_alpha_recurrence(int alpha, const mpq_class& t);

/// All of P_0..P_alpha from the recurrence.
std::vector<PalphaPoly> p_alpha_recurrence_all(int alpha, const mpq_class& t);

enum class Verdict { holds, fails, inconclusive };
std::string to_string(Verdict v);

/// b_m = a_{m,alpha} alpha^{-2 theta m}, m = 0..floor(alpha/2), as enclosures.
struct WeightedSeq {
  int alpha;
  double theta;
  std::vector<Interval> values;
};

WeightedSeq weighted_sequence(int alpha, double theta, mpfr_prec_t prec = 256);

/// Certified b_{m+1} < b_m for every m, via a_{m+1}/a_m < alpha^{2 theta}.
Verdict weighted_sequence_decreasing(int alpha, double theta, mpfr_prec_t prec = 256);

struct EvenSumResult {
  Interval value;
  bool bound_holds;  // lower end >= 3/4 - 1e-30
};

/// sum over even m of (4i)^{-m} a_{m,alpha} alpha^{-2 theta m} (a real number).
EvenSumResult even_partial_sum_check(int alpha, double theta, mpfr_prec_t prec = 256);

/// |P(xi)| enclosure for real xi.
Interval abs_poly_at(const PalphaPoly& p, const Interval& xi);

struct PacketBoundResult {
  Verdict verdict = Verdict::inconclusive;
  double lhs_lower = 0;  // |P_alpha(xi_alpha)| lower end
  double rhs_upper = 0;  // displayed lower bound, upper end
  mpfr_prec_t precision = 0;
};

/// |P_alpha(t^{-1/2} alpha^theta)| >= (3/4)(2 t^{1/2} e^{-(2/t)^{1/(2 theta)}})^alpha alpha^{theta alpha},
/// decided with interval arithmetic, doubling precision up to max_prec.
PacketBoundResult packet_lower_bound_check(int alpha, const mpq_class& t, double theta, mpfr_prec_t prec = 256,
                                           mpfr_prec_t max_prec = 1024);

struct ViolationReport {
  double theta = 0;
  double s = 0;
  mpq_class t;
  double A = 0, B = 0, a = 0;
  std::optional<int> alpha_star;
  std::string lhs_lower;  // decimal, rounded down
  std::string rhs_upper;  // decimal, rounded up
  double lhs_radius = 0;
  double rhs_radius = 0;
  mpfr_prec_t precision_bits = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Minimal alpha <= alpha_max with certified
/// |P_alpha(xi_alpha)| e^{-(1 + xi_alpha)^{1/theta}} > A (2B)^alpha alpha!^s e^{-a xi_alpha^{1/theta}}.
ViolationReport find_violation(double theta, double s, const mpq_class& t, double A, double B, double a,
                               int alpha_max, mpfr_prec_t prec = 256);

/// Exact rational from "p/q" (or an integer); throws on anything else.
mpq_class parse_rational(const std::string& text);
std::string rational_string(const mpq_class& q);

}  // namespace gevlab
