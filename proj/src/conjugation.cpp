#include "gevlab/conjugation.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "gevlab/fit.hpp"
#include "gevlab/gs_spaces.hpp"

namespace gevlab {

CoefficientSpec make_coefficient_spec(std::function<cplx(double, double, int)> a,
                                      std::function<cplx(double, double)> b, double theta0, double sigma,
                                      double bound_C, double bound_A, const Grid& g,
                                      const std::vector<double>& times) {
  if (!a || !b) throw InvalidArgument("coefficient callables must be set");
  if (!(theta0 > 1)) throw InvalidArgument("theta0 must exceed 1");
  if (!(sigma > 0 && sigma < 1)) throw InvalidArgument("sigma must lie in (0, 1)");
  if (!(bound_C > 0) || !(bound_A > 0)) throw InvalidArgument("bound constants must be positive");
  for (double t : times)
    for (Index i = 0; i < g.size(); ++i) {
      const double x = g.x(i);
      const double lhs = std::abs(a(t, x, 0).imag());
      if (lhs > bound_C * bracket_power(x, -sigma) * (1 + 1e-12)) {
        std::ostringstream os;
        os << "|Im a| exceeds C<x>^{-sigma} at t = " << t << ", x = " << x;
        throw InvalidArgument(os.str());
      }
    }
  return {std::move(a), std::move(b), theta0, sigma, bound_C, bound_A};
}

double bracket_weight_derivatives(double x, double s, int order) {
  if (!(s >= 1)) throw InvalidArgument("s must be at least 1");
  const double r = 1.0 / s;
  switch (order) {
    case 0:
      return bracket_power(x, r);
    case 1:
      return r * x * bracket_power(x, r - 2);
    case 2:
      return r * bracket_power(x, r - 2) + r * (r - 2) * x * x * bracket_power(x, r - 4);
    default:
      throw InvalidArgument("weight derivative order must be 0, 1 or 2");
  }
}

ConjugatedCoefficients conjugate_coefficients(const CoefficientSpec& spec, double delta, double s, double t,
                                              const Grid& g) {
  if (!(delta >= 0)) throw InvalidArgument("delta must be nonnegative");
  if (!(s >= 1)) throw InvalidArgument("s must be at least 1");
  ConjugatedCoefficients cc{delta, s, t, Field(g), Field(g)};
  const cplx I(0, 1);
  for (Index i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    const double w1 = bracket_weight_derivatives(x, s, 1);
    const double w2 = bracket_weight_derivatives(x, s, 2);
    const cplx a = spec.a(t, x, 0);
    cc.a_delta.values[i] = a - 2.0 * I * delta * w1;
    // -delta a D_x w with D_x w = -i w'.
    cc.b_delta.values[i] = spec.b(t, x) - delta * w2 + delta * delta * w1 * w1 + I * delta * a * w1;
  }
  return cc;
}

std::string ImagDecayFit::csv_header() { return "sigma,s,delta,fitted_q,bound_q,residual"; }

std::string ImagDecayFit::csv_row() const {
  std::ostringstream os;
  os.precision(10);
  os << sigma << ',' << s << ',' << delta << ',' << fitted_q << ',' << bound_q << ',' << residual;
  return os.str();
}

ImagDecayFit verify_imag_decay(const ConjugatedCoefficients& cc, double sigma) {
  const Grid& g = cc.a_delta.grid;
  const double lo = g.half_length() / 8, hi = 0.75 * g.half_length();
  ImagDecayFit out;
  out.sigma = sigma;
  out.s = cc.s;
  out.delta = cc.delta;
  out.bound_q = std::min(sigma, 1 - 1 / cc.s);
  out.window_lo = lo;
  out.window_hi = hi;
  // Fit the tail envelope sup_{y >= x} |Im a_delta(y)|: a decay bound concerns
  // the tail, and the raw profile may cross zero inside the window.
  std::vector<double> xs, vs;
  for (Index i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    if (x < lo || x > hi) continue;
    xs.push_back(x);
    vs.push_back(std::abs(cc.a_delta.values[i].imag()));
  }
  const Index in_window = static_cast<Index>(xs.size());
  for (Index i = in_window - 2; i >= 0; --i) vs[i] = std::max(vs[i], vs[i + 1]);
  std::vector<double> lx, ly;
  for (Index i = 0; i < in_window; ++i)
    if (vs[i] > 1e-300) {
      lx.push_back(std::log(bracket_power(xs[i], 1)));
      ly.push_back(std::log(vs[i]));
    }
  if (in_window < 32) throw InvalidArgument("imaginary-decay window holds fewer than 32 points");
  if (lx.empty()) {
    out.vacuous = true;
    out.bound_holds = true;
    return out;
  }
  const LineFit f = fit_line(Eigen::Map<RVec>(lx.data(), static_cast<Index>(lx.size())),
                             Eigen::Map<RVec>(ly.data(), static_cast<Index>(ly.size())));
  out.fitted_q = -f.slope;
  out.amplitude = std::exp(f.intercept);
  out.residual = f.rms;
  out.bound_holds = out.fitted_q >= out.bound_q - 0.05;
  return out;
}

namespace {

// d2 v + a D v + b v with D = -i d_x, all derivatives spectral.
CVec apply_spatial(const Field& v, const CVec& a, const CVec& b) {
  const Field d1 = spectral_derivative(v, 1);
  const Field d2 = spectral_derivative(v, 2);
  const cplx I(0, 1);
  return d2.values.array() - I * a.array() * d1.values.array() + b.array() * v.values.array();
}

}  // namespace

double conjugation_residual(const CoefficientSpec& spec, double delta, double s, const Field& u, double t) {
  const Grid& g = u.grid;
  const Spectrum su = transform(u);
  const double mx = su.coefficients.cwiseAbs().maxCoeff();
  if (mx == 0) return 0;
  const double top = g.max_frequency() / 2;
  for (Index n = 0; n < g.size(); ++n)
    if (std::abs(g.xi(n)) >= top && std::abs(su.coefficients[n]) > 1e-10 * mx)
      throw InvalidArgument("conjugation residual: field is not band-limited (top octave above 1e-10)");
  const double umax = u.values.cwiseAbs().maxCoeff();
  for (Index i = 0; i < g.size(); ++i)
    if (std::abs(g.x(i)) > 0.75 * g.half_length() && std::abs(u.values[i]) > 1e-10 * umax)
      throw InvalidArgument("conjugation residual: field reaches into the boundary quarter");

  RVec weight(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double e = delta * bracket_weight_derivatives(g.x(i), s, 0);
    if (u.values[i] != cplx(0) && e + std::log(std::abs(u.values[i])) >= kDefaultOverflowThreshold)
      throw NumericalError("conjugation weight overflows on the support of u");
    weight[i] = std::exp(std::min(e, kDefaultOverflowThreshold));
  }
  const ConjugatedCoefficients cc = conjugate_coefficients(spec, delta, s, t, g);
  CVec a(g.size()), b(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    a[i] = spec.a(t, g.x(i), 0);
    b[i] = spec.b(t, g.x(i));
  }
  const Field wu(g, weight.cast<cplx>().cwiseProduct(u.values));
  const CVec lhs = apply_spatial(wu, cc.a_delta.values, cc.b_delta.values);
  const CVec rhs = weight.cast<cplx>().cwiseProduct(apply_spatial(u, a, b));
  return (lhs - rhs).stableNorm() / wu.values.stableNorm();
}

}  // namespace gevlab
