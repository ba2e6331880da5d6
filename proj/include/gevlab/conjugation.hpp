#pragma once

#include <functional>
#include <string>

#include "gevlab/grid.hpp"

namespace gevlab {

/// Coefficients of the spatial operator A = d_x^2 + a(t,x) D_x + b(t,x), D_x = -i d_x.
struct CoefficientSpec {
  /// a(t, x, k) = d_x^k a(t, x) for k <= 2.
  std::function<cplx(double t, double x, int k)> a;
  std::function<cplx(double t, double x)> b;
  double theta0;
  double sigma;
  double bound_C;
  double bound_A;
};

/// Validates the parameter ranges and |Im a(t, x)| <= C <x>^{-sigma} on the grid
/// at each of the given times.
CoefficientSpec make_coefficient_spec(std::function<cplx(double, double, int)> a,
                                      std::function<cplx(double, double)> b, double theta0, double sigma,
                                      double bound_C, double bound_A, const Grid& check_grid,
                                      const std::vector<double>& check_times = {0.0});

struct ConjugatedCoefficients {
  double delta;
  double s;
  double t;
  Field a_delta;
  Field b_delta;
};

/// <x>^{1/s} and its first two derivatives.
double bracket_weight_derivatives(double x, double s, int order);

/// Coefficients of e^{delta w} A e^{-delta w}, w = <x>^{1/s}.
ConjugatedCoefficients conjugate_coefficients(const CoefficientSpec& spec, double delta, double s, double t,
                                              const Grid& g);

struct ImagDecayFit {
  double sigma = 0;
  double s = 0;
  double delta = 0;
  double fitted_q = 0;
  double bound_q = 0;
  double amplitude = 0;
  double residual = 0;
  double window_lo = 0;
  double window_hi = 0;
  bool vacuous = false;
  bool bound_holds = false;  // fitted_q >= bound_q - 0.05

  static std::string csv_header();
  std::string csv_row() const;
};

/// Fit sup_{y >= x} |Im a_delta(y)| ~ C <x>^{-q} for x in [L/8, 3L/4].
ImagDecayFit verify_imag_decay(const ConjugatedCoefficients& cc, double sigma);

/// |A_delta(e^{delta w} u) - e^{delta w} A u| / |e^{delta w} u| with spectral derivatives.
double conjugation_residual(const CoefficientSpec& spec, double delta, double s, const Field& u, double t);

}  // namespace gevlab
