#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gevlab/grid.hpp"

namespace gevlab {

using SymbolMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Closed-form phase-space symbol. eval(x, xi, alpha, beta) returns
/// d_xi^alpha d_x^beta p(x, xi) for alpha, beta <= max_derivative.
struct Symbol {
  std::function<cplx(double x, double xi, int alpha, int beta)> eval;
  int max_derivative = 0;
  double order = 0;

  cplx operator()(double x, double xi) const { return eval(x, xi, 0, 0); }
};

/// Translation of phase space: grid point (x_i, xi_n) carries the symbol
/// value at (x_i + x0, xi_n + xi0). Quantizing the shifted symbol gives an
/// operator unitarily equivalent to the unshifted one (conjugation by a
/// translation and a modulation), which lets a small grid host a symbol
/// living far from the origin.
struct PhaseShift {
  double x0 = 0;
  double xi0 = 0;
};

/// Symbol sampled at every (x_i, xi_n) of a grid; rows index x, columns xi.
class SymbolGrid {
 public:
  SymbolGrid(const Grid& g, SymbolMatrix values, double order, PhaseShift shift = {});

  static SymbolGrid sample(const Symbol& p, const Grid& g, PhaseShift shift = {});

  const Grid& grid() const { return grid_; }
  double order() const { return order_; }
  const SymbolMatrix& values() const { return values_; }
  PhaseShift shift() const { return shift_; }

  double x(Index i) const { return grid_.x(i) + shift_.x0; }
  double xi(Index n) const { return grid_.xi(n) + shift_.xi0; }

  /// Derivative callables available up to this order (-1 if none).
  int derivative_order() const { return symbol_ ? symbol_->max_derivative : -1; }
  const std::optional<Symbol>& symbol() const { return symbol_; }
  cplx derivative(Index i, Index n, int alpha, int beta) const;

 private:
  Grid grid_;
  SymbolMatrix values_;
  double order_;
  PhaseShift shift_;
  std::optional<Symbol> symbol_;
};

struct SeminormEstimate {
  int ell = 0;
  double order = 0;
  double value = 0;
  bool finite_difference = false;  // derivatives came from the difference fallback
};

struct QuantizeOptions {
  unsigned threads = 1;
};

/// (p(x,D)u)(x_i) = (1/2L) sum_n e^{i xi_n x_i} p(x_i, xi_n) u^(xi_n), evaluated directly.
Field quantize(const SymbolGrid& p, const Field& u, QuantizeOptions opts = {});

/// max over alpha, beta <= ell and grid points of |d_xi^alpha d_x^beta p| <xi>^{-m}.
SeminormEstimate estimate_seminorm(const SymbolGrid& p, int ell, double m, bool allow_finite_difference = false);

/// sum_{alpha < n_trunc} (1/alpha!) d_xi^alpha p1 D_x^alpha p2 with D_x = -i d_x.
SymbolGrid compose_truncated(const SymbolGrid& p1, const SymbolGrid& p2, int n_trunc);

/// min over the ensemble of Re<p(x,D)u, u> / |u|^2; requires Re p >= 0 on the grid.
double garding_lower_check(const SymbolGrid& p, const std::vector<Field>& ensemble, QuantizeOptions opts = {});

/// max over the ensemble of |p(x,D)u| / |u|, divided by max_{alpha,beta<=2} sup|d_xi^alpha d_x^beta p|.
double cv_bound_check(const SymbolGrid& p, const std::vector<Field>& ensemble, QuantizeOptions opts = {});

/// Random fields whose spectra are supported on |xi| <= band with independent
/// Gaussian coefficients. The mode lattice depends only on the grid half length,
/// so for a fixed seed the same functions are produced at every resolution.
std::vector<Field> band_limited_ensemble(const Grid& g, double band, int count, unsigned seed);

}  // namespace gevlab
