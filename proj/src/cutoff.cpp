#include "gevlab/cutoff.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace gevlab {
namespace {

double bump(double y) {
  const double d = 1 - y * y;
  return d > 0 ? std::exp(-1 / d) : 0.0;
}

// Composite Gauss-Legendre on [a, b].
double integrate_bump(double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 30>;
  const double w = (b - a) / panels;
  double acc = 0;
  for (int k = 0; k < panels; ++k) acc += Rule::integrate(bump, a + k * w, a + (k + 1) * w);
  return acc;
}

std::vector<long double> derivative_of(const std::vector<long double>& p) {
  std::vector<long double> d(p.size() > 1 ? p.size() - 1 : 1, 0.0L);
  for (size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<long double>(k) * p[k];
  return d;
}

std::vector<long double> multiply(const std::vector<long double>& a, const std::vector<long double>& b) {
  std::vector<long double> c(a.size() + b.size() - 1, 0.0L);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

void accumulate(std::vector<long double>& into, const std::vector<long double>& p) {
  if (into.size() < p.size()) into.resize(p.size(), 0.0L);
  for (size_t k = 0; k < p.size(); ++k) into[k] += p[k];
}

}  // namespace

BumpCutoff::BumpCutoff(double theta_h) : theta_h_(theta_h) {
  if (!(theta_h > 1)) throw InvalidArgument("cutoff Gevrey order must exceed 1");
  mass_ = integrate_bump(-1, 1, 16);
  // P_{n+1} = P_n' (1-y^2)^2 + 4n y (1-y^2) P_n - 2y P_n.
  const std::vector<long double> one_minus_y2{1, 0, -1};
  const std::vector<long double> sq = multiply(one_minus_y2, one_minus_y2);
  poly_[0] = {1};
  for (int n = 0; n + 1 < kMaxDerivative; ++n) {
    const auto& p = poly_[static_cast<size_t>(n)];
    std::vector<long double> next = multiply(derivative_of(p), sq);
    accumulate(next, multiply(multiply({0, 4.0L * n}, one_minus_y2), p));
    accumulate(next, multiply({0, -2}, p));
    poly_[static_cast<size_t>(n + 1)] = std::move(next);
  }
}

double BumpCutoff::bump_derivative(double y, int n) const {
  if (n < 0 || n >= kMaxDerivative) throw InvalidArgument("bump derivative order out of range");
  const long double d = 1.0L - static_cast<long double>(y) * y;
  if (d <= 0) return 0.0;
  const auto& p = poly_[static_cast<size_t>(n)];
  long double v = 0;
  for (size_t k = p.size(); k-- > 0;) v = v * y + p[k];
  const long double lg = -1.0L / d - 2.0L * n * std::log(d);
  return static_cast<double>(v * std::exp(lg));
}

double BumpCutoff::bump_primitive(double y) const {
  if (y <= -1) return 0.0;
  if (y >= 1) return 1.0;
  // Integrate from the nearer endpoint.
  if (y > 0) return 1.0 - bump_primitive(-y);
  return integrate_bump(-1, y, 4) / mass_;
}

double BumpCutoff::derivative(double x, int order) const {
  if (order < 0 || order > kMaxDerivative) throw InvalidArgument("cutoff derivative order out of range");
  const double ax = std::abs(x);
  if (ax >= 1) return 0.0;
  if (ax <= 0.5) return order == 0 ? 1.0 : 0.0;
  const double y = 4 * ax - 3;
  if (order == 0) return 1.0 - bump_primitive(y);
  const double chain = std::pow(x > 0 ? 4.0 : -4.0, order);
  return -chain * bump_derivative(y, order - 1) / mass_;
}

CutoffSamples make_cutoff_h(const BumpCutoff& h, const Grid& g) {
  if (0.5 / g.spacing() < 16) throw InvalidArgument("grid does not resolve the cutoff transition layer");
  if (g.half_length() <= 1) throw InvalidArgument("grid must contain the cutoff support");
  Field f = sample(g, [&](double x) { return cplx(h(x), 0); });
  const Spectrum s = transform(f);
  return {std::move(f), s.coefficients[g.size() / 2].real(), s.coefficients.real().minCoeff()};
}

}  // namespace gevlab
