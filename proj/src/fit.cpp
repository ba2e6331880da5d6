#include "gevlab/fit.hpp"

#include <cmath>
#include <limits>

namespace gevlab {

LineFit fit_line(const RVec& x, const RVec& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("line fit needs at least two points");
  Eigen::MatrixX2d A(x.size(), 2);
  A.col(0).setOnes();
  A.col(1) = x;
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  LineFit f;
  f.intercept = c[0];
  f.slope = c[1];
  f.rms = std::sqrt((A * c - y).squaredNorm() / static_cast<double>(x.size()));
  return f;
}

double minimize_scalar(const std::function<double(double)>& f, double lo, double hi, int scan_points, double tol) {
  if (!(hi > lo) || scan_points < 3) throw InvalidArgument("minimize_scalar: bad bracket");
  const double step = (hi - lo) / (scan_points - 1);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k < scan_points; ++k) {
    const double v = f(lo + k * step);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double a = lo + std::max(best - 1, 0) * step;
  double b = lo + std::min(best + 1, scan_points - 1) * step;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

namespace {

struct Projected {
  double log_amplitude, rate, sq_residual;
};

Projected project(const RVec& t, const RVec& log_f, double q) {
  const RVec tq = t.array().pow(q);
  const LineFit lf = fit_line(tq, log_f);
  return {lf.intercept, -lf.slope, lf.rms * lf.rms};
}

}  // namespace

StretchedExpFit fit_stretched_exponential(const RVec& t, const RVec& log_f, double lo, double hi) {
  if (t.size() != log_f.size() || t.size() < 3) throw InvalidArgument("stretched fit needs at least three points");
  const double q = minimize_scalar([&](double e) { return project(t, log_f, e).sq_residual; }, lo, hi);
  const Projected p = project(t, log_f, q);
  return {q, p.log_amplitude, p.rate, std::sqrt(p.sq_residual)};
}

}  // namespace gevlab
