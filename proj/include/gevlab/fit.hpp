#pragma once

#include <functional>

#include "gevlab/grid.hpp"

namespace gevlab {

struct LineFit {
  double intercept = 0;
  double slope = 0;
  double rms = 0;  // root-mean-square residual
};

/// Ordinary least squares y ~ intercept + slope x.
LineFit fit_line(const RVec& x, const RVec& y);

/// Fit of log f(t) = log_amplitude - rate t^exponent.
struct StretchedExpFit {
  double exponent = 0;
  double log_amplitude = 0;
  double rate = 0;
  double rms = 0;  // in log f
};

/// Variable projection: the exponent is found by a bracketed 1D search,
/// amplitude and rate by linear least squares at each trial exponent.
StretchedExpFit fit_stretched_exponential(const RVec& t, const RVec& log_f, double exponent_lo = 0.02,
                                          double exponent_hi = 4.0);

/// Minimize f on [lo, hi]: coarse scan followed by golden-section refinement.
double minimize_scalar(const std::function<double(double)>& f, double lo, double hi, int scan_points = 200,
                       double tol = 1e-10);

}  // namespace gevlab
