#include "gevlab/psido.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "gevlab/gs_spaces.hpp"

namespace gevlab {

SymbolGrid::SymbolGrid(const Grid& g, SymbolMatrix values, double order, PhaseShift shift)
    : grid_(g), values_(std::move(values)), order_(order), shift_(shift) {
  if (values_.rows() != g.size() || values_.cols() != g.size())
    throw InvalidArgument("symbol matrix shape does not match grid");
  if (!values_.allFinite()) throw NumericalError("symbol has non-finite values");
}

SymbolGrid SymbolGrid::sample(const Symbol& p, const Grid& g, PhaseShift shift) {
  const Index n = g.size();
  SymbolMatrix v(n, n);
  for (Index i = 0; i < n; ++i) {
    const double x = g.x(i) + shift.x0;
    for (Index k = 0; k < n; ++k) v(i, k) = p.eval(x, g.xi(k) + shift.xi0, 0, 0);
  }
  SymbolGrid out(g, std::move(v), p.order, shift);
  out.symbol_ = p;
  return out;
}

cplx SymbolGrid::derivative(Index i, Index n, int alpha, int beta) const {
  if (alpha == 0 && beta == 0) return values_(i, n);
  if (!symbol_ || alpha > symbol_->max_derivative || beta > symbol_->max_derivative)
    throw InvalidArgument("symbol derivative beyond declared access");
  return symbol_->eval(x(i), xi(n), alpha, beta);
}

Field quantize(const SymbolGrid& p, const Field& u, QuantizeOptions opts) {
  if (!(p.grid() == u.grid)) throw InvalidArgument("quantize: symbol and field grids differ");
  const Grid& g = u.grid;
  const Index n = g.size(), mask = n - 1;
  const Spectrum s = transform(u);

  // e^{i xi_n x_i} = (-1)^j w^{j i}, w = e^{2 pi i / N}, j = n - N/2.
  CVec roots(n);
  for (Index k = 0; k < n; ++k)
    roots[k] = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  CVec c(n);
  std::vector<Index> jmod(static_cast<size_t>(n));
  for (Index k = 0; k < n; ++k) {
    c[k] = ((g.mode(k) & 1) ? -1.0 : 1.0) * s.coefficients[k];
    jmod[static_cast<size_t>(k)] = g.mode(k) & mask;
  }
  const double scale = 1.0 / (2 * g.half_length());
  const SymbolMatrix& P = p.values();

  Field out(g);
  auto rows = [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      cplx acc = 0;
      for (Index k = 0; k < n; ++k) acc += P(i, k) * c[k] * roots[(jmod[static_cast<size_t>(k)] * i) & mask];
      out.values[i] = scale * acc;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    rows(0, n);
  } else {
    std::vector<std::jthread> pool;
    const Index chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const Index b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(rows, b, e);
    }
  }
  return out;
}

namespace {

// Iterated centered differences of the value matrix; invalid border cells
// are marked by NaN so that the max below skips them.
SymbolMatrix centered_difference(const SymbolMatrix& v, bool along_x, double h) {
  const Index n = v.rows();
  const cplx nan(std::numeric_limits<double>::quiet_NaN(), 0);
  SymbolMatrix d = SymbolMatrix::Constant(n, n, nan);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) {
      if (along_x) {
        if (i > 0 && i + 1 < n) d(i, k) = (v(i + 1, k) - v(i - 1, k)) / (2 * h);
      } else {
        if (k > 0 && k + 1 < n) d(i, k) = (v(i, k + 1) - v(i, k - 1)) / (2 * h);
      }
    }
  return d;
}

}  // namespace

SeminormEstimate estimate_seminorm(const SymbolGrid& p, int ell, double m, bool allow_fd) {
  if (ell < 0) throw InvalidArgument("seminorm index must be nonnegative");
  const Grid& g = p.grid();
  const Index n = g.size();
  SeminormEstimate est;
  est.ell = ell;
  est.order = m;
  RVec inv_weight(n);
  for (Index k = 0; k < n; ++k) inv_weight[k] = bracket_power(p.xi(k), -m);

  if (p.derivative_order() >= ell) {
    double best = 0;
    for (int a = 0; a <= ell; ++a)
      for (int b = 0; b <= ell; ++b)
        for (Index i = 0; i < n; ++i)
          for (Index k = 0; k < n; ++k) best = std::max(best, std::abs(p.derivative(i, k, a, b)) * inv_weight[k]);
    est.value = best;
    return est;
  }
  if (!allow_fd) throw InvalidArgument("seminorm order exceeds derivative access and no fallback enabled");
  est.finite_difference = true;
  SymbolMatrix dx = p.values();
  double best = 0;
  for (int b = 0; b <= ell; ++b) {
    SymbolMatrix cur = dx;
    for (int a = 0; a <= ell; ++a) {
      for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k) {
          const double v = std::abs(cur(i, k));
          if (std::isfinite(v)) best = std::max(best, v * inv_weight[k]);
        }
      if (a < ell) cur = centered_difference(cur, false, g.frequency_spacing());
    }
    if (b < ell) dx = centered_difference(dx, true, g.spacing());
  }
  est.value = best;
  return est;
}

SymbolGrid compose_truncated(const SymbolGrid& p1, const SymbolGrid& p2, int n_trunc) {
  if (!(p1.grid() == p2.grid())) throw InvalidArgument("compose: grids differ");
  if (p1.shift().x0 != p2.shift().x0 || p1.shift().xi0 != p2.shift().xi0)
    throw InvalidArgument("compose: phase shifts differ");
  if (n_trunc < 1) throw InvalidArgument("compose: truncation must be at least 1");
  if (p1.derivative_order() < n_trunc - 1 || p2.derivative_order() < n_trunc - 1)
    throw InvalidArgument("compose: insufficient derivative access");
  const Index n = p1.grid().size();
  SymbolMatrix q = SymbolMatrix::Zero(n, n);
  double inv_fact = 1;
  cplx minus_i_pow = 1;
  for (int a = 0; a < n_trunc; ++a) {
    if (a > 0) {
      inv_fact /= a;
      minus_i_pow *= cplx(0, -1);
    }
    const cplx coef = inv_fact * minus_i_pow;
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k) q(i, k) += coef * p1.derivative(i, k, a, 0) * p2.derivative(i, k, 0, a);
  }
  return SymbolGrid(p1.grid(), std::move(q), p1.order() + p2.order(), p1.shift());
}

double garding_lower_check(const SymbolGrid& p, const std::vector<Field>& ensemble, QuantizeOptions opts) {
  if (ensemble.empty()) throw InvalidArgument("garding check needs a nonempty ensemble");
  const double scale = p.values().cwiseAbs().maxCoeff();
  const double worst = p.values().real().minCoeff();
  if (worst < -1e-12 * scale) {
    std::ostringstream os;
    os << "symbol has negative real part on the grid (min " << worst << ")";
    throw InvalidArgument(os.str());
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Field& u : ensemble) {
    const double nu = l2_norm(u);
    if (!(nu > 0)) throw InvalidArgument("garding check: ensemble member is zero");
    const Field pu = quantize(p, u, opts);
    best = std::min(best, inner_product(pu, u).real() / (nu * nu));
  }
  return best;
}

double cv_bound_check(const SymbolGrid& p, const std::vector<Field>& ensemble, QuantizeOptions opts) {
  if (p.order() != 0) throw InvalidArgument("Calderon-Vaillancourt check needs an order-0 symbol");
  if (ensemble.empty()) throw InvalidArgument("cv check needs a nonempty ensemble");
  const double semi = estimate_seminorm(p, 2, 0.0, true).value;
  double ratio = 0;
  for (const Field& u : ensemble) {
    const double nu = l2_norm(u);
    if (!(nu > 0)) throw InvalidArgument("cv check: ensemble member is zero");
    ratio = std::max(ratio, l2_norm(quantize(p, u, opts)) / nu);
  }
  if (semi == 0) return 0;  // p = 0 gives the zero operator
  return ratio / semi;
}

std::vector<Field> band_limited_ensemble(const Grid& g, double band, int count, unsigned seed) {
  if (count < 1) throw InvalidArgument("ensemble size must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double dxi = g.frequency_spacing();
  const auto jmax = static_cast<Index>(std::floor(band / dxi));
  if (jmax >= g.size() / 2) throw InvalidArgument("ensemble band exceeds the grid");
  std::vector<Field> out;
  out.reserve(static_cast<size_t>(count));
  for (int m = 0; m < count; ++m) {
    Spectrum s(g);
    for (Index j = -jmax; j <= jmax; ++j) {
      const double re = normal(rng), im = normal(rng);
      s.coefficients[j + g.size() / 2] = cplx(re, im);
    }
    out.push_back(inverse_transform(s));
  }
  return out;
}

}  // namespace gevlab
