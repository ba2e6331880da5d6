#include "gevlab/evolution.hpp"

#include <cmath>
#include <sstream>

#include "gevlab/gs_spaces.hpp"

namespace gevlab {

Field free_propagate(const Field& g, double t) {
  if (t == 0) return g;
  Spectrum s = transform(g);
  for (Index n = 0; n < g.grid.size(); ++n) {
    const double xi = g.grid.xi(n);
    s.coefficients[n] *= std::polar(1.0, -xi * xi * t);
  }
  return inverse_transform(s);
}

Field model_rhs(const Field& u, const ModelParams& p) {
  const Field d1 = spectral_derivative(u, 1);
  const Field d2 = spectral_derivative(u, 2);
  const cplx I(0, 1);
  Field out(u.grid);
  for (Index i = 0; i < u.grid.size(); ++i)
    out.values[i] = I * d2.values[i] - I * bracket_power(u.grid.x(i), -p.sigma) * d1.values[i];
  return out;
}

Field exact_sigma0_solution(const Field& g, double t) {
  if (t == 0) return g;
  Spectrum s = transform(g);
  double worst = -std::numeric_limits<double>::infinity();
  for (Index n = 0; n < g.grid.size(); ++n) {
    const double a = std::abs(s.coefficients[n]);
    if (a > 0) worst = std::max(worst, g.grid.xi(n) * t + std::log(a));
  }
  if (worst >= kDefaultOverflowThreshold) {
    std::ostringstream os;
    os << "exact sigma = 0 solution overflows: exponent " << worst;
    throw NumericalError(os.str());
  }
  for (Index n = 0; n < g.grid.size(); ++n) {
    const double xi = g.grid.xi(n);
    s.coefficients[n] *= std::exp(xi * t) * std::polar(1.0, -xi * xi * t);
  }
  return inverse_transform(s);
}

namespace {

double boundary_fraction(const Field& u) {
  const Grid& g = u.grid;
  double outer = 0, total = 0;
  const double scale = u.values.cwiseAbs().maxCoeff();
  if (scale == 0) return 0;
  for (Index i = 0; i < g.size(); ++i) {
    const double a = std::norm(u.values[i] / scale);
    total += a;
    if (std::abs(g.x(i)) > 0.75 * g.half_length()) outer += a;
  }
  return outer / total;
}

}  // namespace

TrajectoryRecord evolve(const Field& g0, const ModelParams& p, const EvolutionConfig& cfg) {
  const Grid& g = g0.grid;
  const Index N = g.size();
  if (!(cfg.dt > 0) || !(cfg.t_final > 0) || cfg.dt > cfg.t_final)
    throw InvalidArgument("evolve: need 0 < dt <= t_final");
  if (p.sigma < 0) throw InvalidArgument("evolve: sigma must be nonnegative");
  if (cfg.absorber && cfg.absorber->size() != N) throw InvalidArgument("evolve: absorber length mismatch");

  const auto steps = static_cast<long>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
  const double dt = cfg.t_final / static_cast<double>(steps);

  RVec coef(N);
  for (Index i = 0; i < N; ++i) coef[i] = cfg.drift_enabled ? bracket_power(g.x(i), -p.sigma) : 0.0;
  const double xi_max = g.max_frequency();
  if (dt * coef.maxCoeff() * xi_max > 0.5) {
    std::ostringstream os;
    os << "evolve: drift step bound violated, dt * max(<x>^-sigma |xi|) = " << dt * coef.maxCoeff() * xi_max;
    throw InvalidArgument(os.str());
  }
  if (dt * xi_max * xi_max > std::numbers::pi) warn("evolve: dispersion phase per step exceeds pi");

  Spectrum s = transform(g0);
  CVec Y = s.coefficients;
  const double ymax = Y.cwiseAbs().maxCoeff();
  RVec xi = g.frequencies();
  Eigen::Array<bool, Eigen::Dynamic, 1> keep(N);
  for (Index n = 0; n < N; ++n) keep[n] = 3 * std::abs(g.mode(n)) <= N;
  for (Index n = 0; n < N; ++n)
    if (!keep[n] && std::abs(Y[n]) > 1e-8 * ymax)
      throw InvalidArgument("evolve: initial spectrum violates the dealiasing band");

  CVec half(N);
  for (Index n = 0; n < N; ++n) half[n] = std::polar(1.0, -xi[n] * xi[n] * dt / 2);
  auto dealias = [&](CVec& v) {
    for (Index n = 0; n < N; ++n)
      if (!keep[n]) v[n] = 0;
  };

  CVec phys(N), tmp(N);
  // Spectral drift right-hand side: F[c(x) F^{-1}[xi Y]].
  auto drift = [&](const CVec& Z, CVec& out) {
    tmp = xi.cast<cplx>().cwiseProduct(Z);
    inverse_ordered(g, tmp, phys);
    phys = coef.cast<cplx>().cwiseProduct(phys);
    forward_ordered(g, phys, out);
  };

  const double sqrt2L = std::sqrt(2 * g.half_length());
  double log_factor = 0;
  TrajectoryRecord rec{{}, {}, {}, Snapshot{0.0, Field(g), 0.0}, 0.0};
  auto physical = [&]() {
    Field f(g);
    inverse_ordered(g, Y, f.values);
    return f;
  };
  auto record = [&](long step) {
    const double nrm = Y.stableNorm() / sqrt2L;
    if (!std::isfinite(nrm)) {
      std::ostringstream os;
      os << "evolve: non-finite state at step " << step;
      throw NumericalError(os.str());
    }
    double lg = std::log(nrm);
    if (lg > cfg.renorm_threshold) {
      Y /= nrm;
      log_factor += lg;
      lg = 0;
    }
    rec.times.push_back(static_cast<double>(step) * dt);
    rec.log_l2.push_back(log_factor + lg);
    const bool snap = cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0;
    if (snap || step == steps || step == 0) {
      Field f = physical();
      rec.max_boundary_fraction = std::max(rec.max_boundary_fraction, boundary_fraction(f));
      if (snap) rec.snapshots.push_back({static_cast<double>(step) * dt, f, log_factor});
      if (step == steps) rec.final_state = {static_cast<double>(step) * dt, std::move(f), log_factor};
    }
  };

  record(0);
  CVec k1(N), k2(N), k3(N), k4(N), stage(N);
  for (long step = 1; step <= steps; ++step) {
    Y = Y.cwiseProduct(half);
    if (cfg.drift_enabled) {
      drift(Y, k1);
      stage = Y + (dt / 2) * k1;
      drift(stage, k2);
      stage = Y + (dt / 2) * k2;
      drift(stage, k3);
      stage = Y + dt * k3;
      drift(stage, k4);
      Y += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
      dealias(Y);
    }
    Y = Y.cwiseProduct(half);
    if (cfg.absorber) {
      inverse_ordered(g, Y, phys);
      phys = cfg.absorber->cast<cplx>().cwiseProduct(phys);
      forward_ordered(g, phys, Y);
    }
    record(step);
  }
  return rec;
}

std::string TrajectoryRecord::csv() const {
  std::ostringstream os;
  os.precision(15);
  os << "t,log_l2\n";
  for (size_t k = 0; k < times.size(); ++k) os << times[k] << ',' << log_l2[k] << '\n';
  return os.str();
}

std::string snapshot_text(const Snapshot& s) {
  std::ostringstream os;
  os.precision(17);
  os << "# time " << s.time << " log_factor " << s.log_factor << "\n# x re im\n";
  for (Index i = 0; i < s.field.grid.size(); ++i)
    os << s.field.grid.x(i) << ' ' << s.field.values[i].real() << ' ' << s.field.values[i].imag() << '\n';
  return os.str();
}

}  // namespace gevlab
