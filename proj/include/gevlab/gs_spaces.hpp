#pragma once

#include <string>

#include "gevlab/grid.hpp"

namespace gevlab {

/// <x>^p = (1 + x^2)^{p/2}.
inline double bracket_power(double x, double p) { return std::pow(std::hypot(1.0, x), p); }

/// Exponents of the weighted norm e^{rho2 <x>^{1/s}} e^{rho1 <D>^{1/theta}}.
struct GSParams {
  double theta;
  double s;
  double rho1;
  double rho2;

  GSParams(double theta_, double s_, double rho1_, double rho2_);
};

/// Default exponent ceiling (natural log units) for exponential weights.
inline constexpr double kDefaultOverflowThreshold = 700.0;

/// Frequency weight first, then the spatial weight; L2 norm of the result.
double gs_sobolev_norm(const Field& u, const GSParams& p, double overflow_threshold = kDefaultOverflowThreshold);

/// |f(x)| ~ C exp(-c |x|^{inverse_order}) on window_lo <= |x| <= window_hi.
struct DecayFit {
  double inverse_order = 0;
  double rate = 0;
  double amplitude = 0;
  double residual = 0;  // RMS in log(-log(|u|/C)) vs log|x| coordinates
  double window_lo = 0;
  double window_hi = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

DecayFit fit_decay_exponent(const Field& u, double window_lo, double window_hi);

/// theta such that |u^(xi)| ~ exp(-rho <xi>^{1/theta}) on the decaying range.
double estimate_gevrey_order(const Field& u);

}  // namespace gevlab
