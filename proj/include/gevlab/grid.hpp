#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <type_traits>

#include "gevlab/diagnostics.hpp"
#include "gevlab/error.hpp"

namespace gevlab {

using Eigen::Index;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

/// Periodic grid x_i = -L + i dx on [-L, L), dx = 2L/N, with ordered
/// frequencies xi_n = pi (n - N/2) / L for n = 0..N-1.
template <typename Real = double>
class BasicGrid {
 public:
  BasicGrid(Index num_points, Real half_length) : n_(num_points), L_(half_length) {
    if (n_ < 8 || (n_ & (n_ - 1)) != 0)
      throw InvalidArgument("grid size must be a power of two >= 8");
    if (!(L_ > 0) || !std::isfinite(L_)) throw InvalidArgument("grid half length must be positive");
    dx_ = 2 * L_ / static_cast<Real>(n_);
  }

  Index size() const { return n_; }
  Real half_length() const { return L_; }
  Real spacing() const { return dx_; }
  Real x(Index i) const { return -L_ + static_cast<Real>(i) * dx_; }
  /// Signed mode number j of ordered frequency index n.
  Index mode(Index n) const { return n - n_ / 2; }
  Real xi(Index n) const { return std::numbers::pi_v<Real> * static_cast<Real>(mode(n)) / L_; }
  /// Magnitude of the Nyquist frequency, pi N / (2L).
  Real max_frequency() const { return std::numbers::pi_v<Real> * static_cast<Real>(n_ / 2) / L_; }
  Real frequency_spacing() const { return std::numbers::pi_v<Real> / L_; }

  RealVector<Real> positions() const {
    RealVector<Real> v(n_);
    for (Index i = 0; i < n_; ++i) v[i] = x(i);
    return v;
  }
  RealVector<Real> frequencies() const {
    RealVector<Real> v(n_);
    for (Index n = 0; n < n_; ++n) v[n] = xi(n);
    return v;
  }

  friend bool operator==(const BasicGrid& a, const BasicGrid& b) {
    return a.n_ == b.n_ && a.L_ == b.L_;
  }

 private:
  Index n_;
  Real L_;
  Real dx_;
};

/// Samples u(x_i).
template <typename Real = double>
struct BasicField {
  BasicGrid<Real> grid;
  ComplexVector<Real> values;

  explicit BasicField(const BasicGrid<Real>& g) : grid(g), values(ComplexVector<Real>::Zero(g.size())) {}
  BasicField(const BasicGrid<Real>& g, ComplexVector<Real> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw InvalidArgument("field length does not match grid");
  }
};

/// Coefficients u^(xi_n), ordered by increasing frequency.
template <typename Real = double>
struct BasicSpectrum {
  BasicGrid<Real> grid;
  ComplexVector<Real> coefficients;

  explicit BasicSpectrum(const BasicGrid<Real>& g)
      : grid(g), coefficients(ComplexVector<Real>::Zero(g.size())) {}
  BasicSpectrum(const BasicGrid<Real>& g, ComplexVector<Real> c) : grid(g), coefficients(std::move(c)) {
    if (coefficients.size() != grid.size()) throw InvalidArgument("spectrum length does not match grid");
  }
};

using Grid = BasicGrid<double>;
using Field = BasicField<double>;
using Spectrum = BasicSpectrum<double>;
using RVec = RealVector<double>;
using CVec = ComplexVector<double>;
using cplx = std::complex<double>;

namespace detail {

template <typename Real>
Eigen::FFT<Real>& fft_engine() {
  thread_local Eigen::FFT<Real> engine;
  return engine;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
      std::ostringstream os;
      os << what << ": non-finite value at index " << i;
      throw NumericalError(os.str());
    }
  }
}

}  // namespace detail

/// Raw forward transform of physical samples into ordered coefficients
/// (no validation). out may not alias in.
template <typename Real>
void forward_ordered(const BasicGrid<Real>& g, const ComplexVector<Real>& in, ComplexVector<Real>& out) {
  const Index n = g.size(), half = n / 2;
  ComplexVector<Real> tmp(n);
  detail::fft_engine<Real>().fwd(tmp, in);
  out.resize(n);
  const Real dx = g.spacing();
  // N/2 is even, so (-1)^j = (-1)^n.
  for (Index k = 0; k < n; ++k) {
    const Index src = (k + half) & (n - 1);
    out[k] = (k & 1 ? -dx : dx) * tmp[src];
  }
}

/// Raw inverse transform of ordered coefficients into physical samples.
template <typename Real>
void inverse_ordered(const BasicGrid<Real>& g, const ComplexVector<Real>& in, ComplexVector<Real>& out) {
  const Index n = g.size(), half = n / 2;
  ComplexVector<Real> tmp(n);
  for (Index k = 0; k < n; ++k) {
    const Index dst = (k + half) & (n - 1);
    tmp[dst] = (k & 1) ? -in[k] : in[k];
  }
  out.resize(n);
  detail::fft_engine<Real>().inv(out, tmp);
  out /= g.spacing();
}

template <typename Real>
BasicSpectrum<Real> transform(const BasicField<Real>& u) {
  detail::require_finite(u.values, "transform");
  BasicSpectrum<Real> s(u.grid);
  forward_ordered(u.grid, u.values, s.coefficients);
  return s;
}

template <typename Real>
BasicField<Real> inverse_transform(const BasicSpectrum<Real>& s) {
  detail::require_finite(s.coefficients, "inverse_transform");
  BasicField<Real> u(s.grid);
  inverse_ordered(s.grid, s.coefficients, u.values);
  return u;
}

/// Ratio |u^(xi_{-N/2})| / max |u^|; 0 for the zero spectrum.
template <typename Real>
Real nyquist_ratio(const BasicSpectrum<Real>& s) {
  const Real mx = s.coefficients.cwiseAbs().maxCoeff();
  return mx > 0 ? std::abs(s.coefficients[0]) / mx : Real(0);
}

/// Evaluate m at every grid frequency, rejecting non-finite values.
template <typename Real, typename Multiplier>
ComplexVector<Real> sample_multiplier(const BasicGrid<Real>& g, Multiplier&& m) {
  ComplexVector<Real> out(g.size());
  for (Index n = 0; n < g.size(); ++n) {
    const std::complex<Real> v = m(g.xi(n));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "multiplier is not finite at xi = " << g.xi(n);
      throw NumericalError(os.str());
    }
    out[n] = v;
  }
  return out;
}

/// Spectrum coefficient n becomes m(xi_n) u^(xi_n).
template <typename Real, typename Multiplier>
BasicField<Real> apply_fourier_multiplier(const BasicField<Real>& u, Multiplier&& m) {
  const auto mult = sample_multiplier(u.grid, std::forward<Multiplier>(m));
  auto s = transform(u);
  if (nyquist_ratio(s) > Real(1e-10)) warn("Nyquist coefficient exceeds 1e-10 of the spectrum maximum");
  s.coefficients.array() *= mult.array();
  return inverse_transform(s);
}

/// d^order u / dx^order through the multiplier (i xi)^order.
template <typename Real>
BasicField<Real> spectral_derivative(const BasicField<Real>& u, int order) {
  if (order < 0 || order > 4) throw InvalidArgument("spectral derivative order must be in [0, 4]");
  if (order == 0) return u;
  return apply_fourier_multiplier(u, [order](Real xi) {
    return std::pow(std::complex<Real>(0, xi), order);
  });
}

template <typename Real>
Real l2_norm(const BasicField<Real>& u) {
  return std::sqrt(u.grid.spacing()) * u.values.stableNorm();
}

/// The same norm evaluated from coefficients, sqrt((1/2L) sum |u^|^2).
template <typename Real>
Real l2_norm(const BasicSpectrum<Real>& s) {
  return s.coefficients.stableNorm() / std::sqrt(2 * s.grid.half_length());
}

/// <u, v> = dx sum u conj(v).
template <typename Real>
std::complex<Real> inner_product(const BasicField<Real>& u, const BasicField<Real>& v) {
  if (!(u.grid == v.grid)) throw InvalidArgument("inner product of fields on different grids");
  return u.grid.spacing() * v.values.dot(u.values);
}

/// Sample a function of x on the grid.
template <typename Real, typename F>
BasicField<Real> sample(const BasicGrid<Real>& g, F&& f) {
  BasicField<Real> u(g);
  for (Index i = 0; i < g.size(); ++i) u.values[i] = f(g.x(i));
  return u;
}

/// Build a spectrum from a function of xi.
template <typename Real, typename F>
BasicSpectrum<Real> sample_spectrum(const BasicGrid<Real>& g, F&& f) {
  BasicSpectrum<Real> s(g);
  for (Index n = 0; n < g.size(); ++n) s.coefficients[n] = f(g.xi(n));
  return s;
}

}  // namespace gevlab
