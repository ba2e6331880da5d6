#include "gevlab/gs_spaces.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "gevlab/fit.hpp"

namespace gevlab {

GSParams::GSParams(double theta_, double s_, double rho1_, double rho2_)
    : theta(theta_), s(s_), rho1(rho1_), rho2(rho2_) {
  if (!(theta > 1)) throw InvalidArgument("GSParams: theta must exceed 1");
  if (!(s >= 1)) throw InvalidArgument("GSParams: s must be at least 1");
  if (!(rho1 >= 0) || !(rho2 >= 0)) throw InvalidArgument("GSParams: weights must be nonnegative");
}

namespace {

// Multiply v[k] by exp(exponent(k)) after checking that no product overflows.
template <typename Exponent>
void apply_log_weight(CVec& v, Exponent&& exponent, double threshold, const char* what) {
  double worst = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < v.size(); ++k) {
    const double a = std::abs(v[k]);
    if (a == 0) continue;
    worst = std::max(worst, exponent(k) + std::log(a));
  }
  if (worst >= threshold) {
    std::ostringstream os;
    os << what << " weight overflows: largest exponent " << worst << " >= " << threshold;
    throw NumericalError(os.str());
  }
  for (Index k = 0; k < v.size(); ++k) v[k] *= std::exp(exponent(k));
}

}  // namespace

double gs_sobolev_norm(const Field& u, const GSParams& p, double threshold) {
  Field v = u;
  if (p.rho1 != 0) {
    Spectrum s = transform(u);
    const Grid& g = u.grid;
    apply_log_weight(
        s.coefficients, [&](Index n) { return p.rho1 * bracket_power(g.xi(n), 1.0 / p.theta); }, threshold,
        "frequency");
    v = inverse_transform(s);
  }
  if (p.rho2 != 0) {
    const Grid& g = u.grid;
    apply_log_weight(
        v.values, [&](Index i) { return p.rho2 * bracket_power(g.x(i), 1.0 / p.s); }, threshold, "spatial");
  }
  return l2_norm(v);
}

std::string DecayFit::csv_header() { return "window_lo,window_hi,inverse_order,rate,amplitude,residual"; }

std::string DecayFit::csv_row() const {
  std::ostringstream os;
  os.precision(10);
  os << window_lo << ',' << window_hi << ',' << inverse_order << ',' << rate << ',' << amplitude << ','
     << residual;
  return os.str();
}

DecayFit fit_decay_exponent(const Field& u, double lo, double hi) {
  const Grid& g = u.grid;
  if (!(lo > 0) || !(hi > lo)) throw InvalidArgument("decay window must satisfy 0 < lo < hi");
  if (hi > 0.75 * g.half_length()) throw InvalidArgument("decay window reaches into the boundary quarter");
  std::vector<double> xs, ys;
  for (Index i = 0; i < g.size(); ++i) {
    const double ax = std::abs(g.x(i)), au = std::abs(u.values[i]);
    if (ax >= lo && ax <= hi && au > 1e-300) {
      xs.push_back(ax);
      ys.push_back(std::log(au));
    }
  }
  if (xs.size() < 16) throw InvalidArgument("decay window holds fewer than 16 usable points");
  const RVec t = Eigen::Map<RVec>(xs.data(), static_cast<Index>(xs.size()));
  const RVec y = Eigen::Map<RVec>(ys.data(), static_cast<Index>(ys.size()));
  const StretchedExpFit f = fit_stretched_exponential(t, y);

  DecayFit out;
  out.inverse_order = f.exponent;
  out.rate = f.rate;
  out.amplitude = std::exp(f.log_amplitude);
  out.window_lo = lo;
  out.window_hi = hi;
  // Residual in the doubly logarithmic coordinates of the model.
  double acc = 0;
  Index cnt = 0;
  for (Index k = 0; k < t.size(); ++k) {
    const double d = f.log_amplitude - y[k];
    if (d <= 0 || f.rate <= 0) continue;
    const double r = std::log(d) - (std::log(f.rate) + f.exponent * std::log(t[k]));
    acc += r * r;
    ++cnt;
  }
  out.residual = cnt > 0 ? std::sqrt(acc / static_cast<double>(cnt)) : 0.0;
  return out;
}

double estimate_gevrey_order(const Field& u) {
  const Spectrum s = transform(u);
  const Grid& g = u.grid;
  const RVec mag = s.coefficients.cwiseAbs();
  const double mx = mag.maxCoeff();
  if (!(mx > 0)) throw InvalidArgument("estimate_gevrey_order: zero field");
  const double top = g.max_frequency() / 2;
  std::vector<double> xs, ys;
  for (Index n = 0; n < g.size(); ++n) {
    const double ax = std::abs(g.xi(n));
    if (ax >= top && mag[n] >= 1e-12 * mx)
      throw NumericalError("spectrum does not decay below 1e-12 of its maximum before the last octave");
    if (mag[n] >= 1e-12 * mx && mag[n] <= 0.5 * mx) {
      xs.push_back(bracket_power(g.xi(n), 1.0));
      ys.push_back(std::log(mag[n]));
    }
  }
  if (xs.size() < 16) throw InvalidArgument("estimate_gevrey_order: decaying range too short");
  const RVec t = Eigen::Map<RVec>(xs.data(), static_cast<Index>(xs.size()));
  const RVec y = Eigen::Map<RVec>(ys.data(), static_cast<Index>(ys.size()));
  return 1.0 / fit_stretched_exponential(t, y).exponent;
}

}  // namespace gevlab
