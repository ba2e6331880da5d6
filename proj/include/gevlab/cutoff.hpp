#pragma once

#include <array>
#include <vector>

#include "gevlab/grid.hpp"

namespace gevlab {

/// Smooth cutoff with h = 1 on |x| <= 1/2 and h = 0 on |x| >= 1, built from
/// the normalized integral of the bump y -> exp(-1/(1 - y^2)).
class BumpCutoff {
 public:
  static constexpr int kMaxDerivative = 12;

  explicit BumpCutoff(double theta_h = 2.0);

  double operator()(double x) const { return derivative(x, 0); }
  /// d^order h / dx^order, order <= kMaxDerivative.
  double derivative(double x, int order) const;

  double theta_h() const { return theta_h_; }
  /// Normalizing constant: integral of the bump over [-1, 1].
  double bump_mass() const { return mass_; }

  /// n-th derivative of the bump exp(-1/(1 - y^2)).
  double bump_derivative(double y, int n) const;
  /// Normalized primitive of the bump, 0 at y = -1 and 1 at y = 1.
  double bump_primitive(double y) const;

 private:
  double theta_h_;
  double mass_;
  // P_n with bump^{(n)} = P_n(y) (1 - y^2)^{-2n} bump(y); coefficients ascending.
  std::array<std::vector<long double>, kMaxDerivative> poly_;
};

struct CutoffSamples {
  Field values;
  double integral;      // h^(0) on the grid
  double min_hat;       // min over grid frequencies of Re h^
};

/// Samples h on the grid; requires >= 16 points across the transition layer.
CutoffSamples make_cutoff_h(const BumpCutoff& h, const Grid& g);

}  // namespace gevlab
