#include "gevlab/illposedness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "gevlab/fit.hpp"
#include "gevlab/gs_spaces.hpp"

namespace gevlab {

double PacketSpec::log_scale() const { return -rho2 * std::pow(4.0, 1.0 / s) * std::pow(sigma_k, 1.0 / s); }

void PacketSpec::validate() const {
  if (!(rho0 > 0) || !(theta > 1) || !(rho2 >= 0) || !(s >= 1) || !(sigma_k > 0))
    throw InvalidArgument("packet parameters out of range");
}

Field make_phi(double rho0, double theta, const Grid& g, bool check_resolution) {
  if (!(rho0 > 0) || !(theta > 1)) throw InvalidArgument("make_phi: need rho0 > 0 and theta > 1");
  if (check_resolution && std::exp(-rho0 * bracket_power(g.max_frequency(), 1.0 / theta)) >= 1e-12)
    throw InvalidArgument("make_phi: grid does not resolve the spectrum (tail above 1e-12)");
  return inverse_transform(
      sample_spectrum(g, [&](double xi) { return cplx(std::exp(-rho0 * bracket_power(xi, 1.0 / theta)), 0); }));
}

Field make_phi_k(const Field& phi, const PacketSpec& spec) {
  spec.validate();
  const Grid& g = phi.grid;
  const double shift = 4 * spec.sigma_k;
  const double mx = phi.values.cwiseAbs().maxCoeff();
  double radius = 0;
  for (Index i = 0; i < g.size(); ++i)
    if (std::abs(phi.values[i]) > 1e-14 * mx) radius = std::max(radius, std::abs(g.x(i)));
  if (shift + radius >= g.half_length() || shift + spec.sigma_k >= g.half_length())
    throw InvalidArgument("make_phi_k: shifted packet would cross the boundary");
  const double scale = std::exp(spec.log_scale());
  Spectrum s = transform(phi);
  for (Index n = 0; n < g.size(); ++n) s.coefficients[n] *= scale * std::polar(1.0, -shift * g.xi(n));
  return inverse_transform(s);
}

Localizers::Localizers(BumpCutoff h, double sigma_k) : h_(std::move(h)), sigma_(sigma_k) {
  if (!(sigma_k > 0)) throw InvalidArgument("sigma_k must be positive");
}

double Localizers::x_factor(double x, int alpha, int nu) const {
  if (alpha + nu > BumpCutoff::kMaxDerivative) throw InvalidArgument("localizer derivative order unavailable");
  const double v = h_.derivative((x - 4 * sigma_) / sigma_, alpha + nu);
  return nu == 0 ? v : v * std::pow(sigma_, -nu);
}

double Localizers::xi_factor(double xi, int beta, int gamma) const {
  if (beta + gamma > BumpCutoff::kMaxDerivative) throw InvalidArgument("localizer derivative order unavailable");
  const double v = h_.derivative((xi - sigma_) / (sigma_ / 4), beta + gamma);
  return gamma == 0 ? v : v * std::pow(4 / sigma_, gamma);
}

double Localizers::chi(double xi) const { return h_((xi - sigma_) / (0.75 * sigma_)); }
double Localizers::psi(double x) const { return h_((x - 4 * sigma_) / (3 * sigma_)); }

Symbol Localizers::w(int alpha, int beta) const {
  if (alpha < 0 || beta < 0 || alpha > BumpCutoff::kMaxDerivative || beta > BumpCutoff::kMaxDerivative)
    throw InvalidArgument("localizer derivative order unavailable");
  Symbol p;
  p.order = 0;
  p.max_derivative = BumpCutoff::kMaxDerivative - std::max(alpha, beta);
  p.eval = [self = *this, alpha, beta](double x, double xi, int a, int b) {
    return cplx(self.x_factor(x, alpha, b) * self.xi_factor(xi, beta, a), 0);
  };
  return p;
}

LocalizerSupportReport check_localizer_supports(const Localizers& loc, const Grid& g, int n_max, PhaseShift shift) {
  LocalizerSupportReport r;
  const double sk = loc.sigma_k();
  r.peak = loc.x_factor(4 * sk, 0) * loc.xi_factor(sk, 0);
  for (Index i = 0; i < g.size(); ++i) {
    const double x = g.x(i) + shift.x0;
    for (int a = 0; a <= n_max; ++a) {
      const double f = loc.x_factor(x, a);
      if (f == 0) continue;
      if (a == 0 && (x < 3 * sk || x > 5 * sk)) r.w_support_ok = false;
      if (loc.psi(x) != 1.0) r.disjointness_ok = false;
    }
  }
  for (Index n = 0; n < g.size(); ++n) {
    const double xi = g.xi(n) + shift.xi0;
    for (int b = 0; b <= n_max; ++b) {
      const double f = loc.xi_factor(xi, b);
      if (f == 0) continue;
      if (b == 0 && (xi < 0.75 * sk || xi > 1.25 * sk)) r.w_support_ok = false;
      if (loc.chi(xi) != 1.0) r.disjointness_ok = false;
    }
  }
  return r;
}

Symbol garding_symbol(const Localizers& loc, double sigma) {
  const double sk = loc.sigma_k();
  const double level = std::pow(7.0, -sigma) / 4 * bracket_power(sk, -sigma) * sk;
  Symbol p;
  p.order = 1;
  p.max_derivative = 0;
  p.eval = [loc, sigma, level](double x, double xi, int, int) {
    return cplx((bracket_power(x, -sigma) * xi - level) * loc.psi(x) * loc.chi(xi), 0);
  };
  return p;
}

int compute_N_k(double sigma_k, double lambda, double theta1) {
  if (!(lambda > 0 && lambda < 1)) throw InvalidArgument("lambda must lie in (0, 1)");
  if (!(theta1 >= 1)) throw InvalidArgument("theta1 must be at least 1");
  if (!(sigma_k > 0)) throw InvalidArgument("sigma_k must be positive");
  const double v = std::min(std::floor(std::pow(sigma_k, lambda / theta1)),
                            static_cast<double>(std::numeric_limits<int>::max()));
  if (v < 1) throw InvalidArgument("N_k = 0: sigma_k too small for lambda and theta1");
  return static_cast<int>(v);
}

EnergyConfig make_energy_config(double sigma_k, double lambda, double theta1, double theta_h, double T_star) {
  if (!(theta_h > 1) || !(theta1 > theta_h)) throw InvalidArgument("need theta1 > theta_h > 1");
  if (!(T_star > 0)) throw InvalidArgument("T_star must be positive");
  EnergyConfig c{lambda, theta1, theta_h, sigma_k, compute_N_k(sigma_k, lambda, theta1), T_star};
  if (c.N_k > BumpCutoff::kMaxDerivative) {
    c.N_k = BumpCutoff::kMaxDerivative;
    c.truncated = true;
  }
  return c;
}

double energy_weight(int alpha, int beta, double theta1) {
  return std::exp(-theta1 * (std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0)));
}

double aggregate_energy(const Eigen::MatrixXd& terms, double theta1) {
  double e = 0;
  for (Index a = 0; a < terms.rows(); ++a)
    for (Index b = 0; b < terms.cols(); ++b)
      e += energy_weight(static_cast<int>(a), static_cast<int>(b), theta1) * terms(a, b);
  return e;
}

EnergyResult compute_energy(const Field& u, const EnergyConfig& cfg, const Localizers& loc) {
  const Grid& g = u.grid;
  const Index N = g.size();
  const int K = cfg.N_k;
  EnergyResult r;
  r.terms = Eigen::MatrixXd::Zero(K + 1, K + 1);
  const Spectrum s = transform(u);
  std::vector<RVec> ax(static_cast<size_t>(K + 1), RVec(N));
  for (int a = 0; a <= K; ++a)
    for (Index i = 0; i < N; ++i) ax[static_cast<size_t>(a)][i] = loc.x_factor(g.x(i), a);
  const double sdx = std::sqrt(g.spacing());
  CVec v(N), c(N);
  for (int b = 0; b <= K; ++b) {
    for (Index n = 0; n < N; ++n) c[n] = loc.xi_factor(g.xi(n), b) * s.coefficients[n];
    inverse_ordered(g, c, v);
    for (int a = 0; a <= K; ++a)
      r.terms(a, b) = sdx * ax[static_cast<size_t>(a)].cast<cplx>().cwiseProduct(v).stableNorm();
  }
  r.value = aggregate_energy(r.terms, cfg.theta1);
  return r;
}

EnergyResult compute_energy_dense(const Field& u, const EnergyConfig& cfg, const Localizers& loc, PhaseShift shift,
                                  QuantizeOptions opts) {
  const int K = cfg.N_k;
  EnergyResult r;
  r.terms = Eigen::MatrixXd::Zero(K + 1, K + 1);
  for (int a = 0; a <= K; ++a)
    for (int b = 0; b <= K; ++b) {
      const SymbolGrid w = SymbolGrid::sample(loc.w(a, b), u.grid, shift);
      r.terms(a, b) = l2_norm(quantize(w, u, opts));
    }
  r.value = aggregate_energy(r.terms, cfg.theta1);
  return r;
}

EnergyTrace energy_trace(const TrajectoryRecord& rec, const EnergyConfig& cfg, const Localizers& loc) {
  EnergyTrace tr;
  auto add = [&](const Snapshot& s) {
    const EnergyResult e = compute_energy(s.field, cfg, loc);
    tr.times.push_back(s.time);
    tr.log_E.push_back(std::log(e.value) + s.log_factor);
    tr.terms.push_back(e.terms);
  };
  for (const Snapshot& s : rec.snapshots) add(s);
  if (tr.times.empty() || tr.times.back() < rec.final_state.time) add(rec.final_state);
  return tr;
}

Field make_windowed_packet(const PacketSpec& spec, const Localizers& loc, const Grid& g) {
  spec.validate();
  if (5 * spec.sigma_k >= g.half_length()) throw InvalidArgument("packet does not fit the grid");
  if (1.75 * spec.sigma_k >= g.max_frequency()) throw InvalidArgument("packet window exceeds the grid band");
  const double scale = std::exp(spec.log_scale());
  const double shift = 4 * spec.sigma_k;
  return inverse_transform(sample_spectrum(g, [&](double xi) {
    return scale * std::exp(-spec.rho0 * bracket_power(xi, 1.0 / spec.theta)) * loc.chi(xi) *
           std::polar(1.0, -shift * xi);
  }));
}

Grid packet_grid(double sigma_k, double length_factor, double xi_factor) {
  const double L = length_factor * sigma_k;
  const double need = 2 * L * xi_factor * sigma_k / std::numbers::pi;
  Index n = 8;
  while (static_cast<double>(n) < need) n *= 2;
  return Grid(n, L);
}

std::string InitialEnergyReport::csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "sigma_k,N_k,logE0,combination,fitted\n";
  for (const auto& r : rows)
    os << r.sigma_k << ',' << r.N_k << ',' << r.log_E0 << ',' << r.combination << ',' << r.fitted << '\n';
  os << "rate,intercept,residual,fitted_range,lower_bound_holds\n"
     << rate << ',' << intercept << ',' << residual << ',' << fitted_range << ',' << (lower_bound_holds ? 1 : 0) << '\n';
  return os.str();
}

InitialEnergyReport initial_energy_bound_check(const PacketSpec& base, const std::vector<double>& sigma_list,
                                               double lambda, double theta1, double theta_h) {
  if (sigma_list.size() < 3) throw InvalidArgument("initial energy sweep needs at least three sigma_k values");
  InitialEnergyReport rep;
  const BumpCutoff h(theta_h);
  for (double sk : sigma_list) {
    PacketSpec spec = base;
    spec.sigma_k = sk;
    const Grid g = packet_grid(sk, 8.0, 2.0);
    const Localizers loc(h, sk);
    const EnergyConfig cfg = make_energy_config(sk, lambda, theta1, theta_h, 1.0);
    const EnergyResult e = compute_energy(make_windowed_packet(spec, loc, g), cfg, loc);
    if (!(e.value > 0)) throw NumericalError("initial energy is not positive");
    const double lg = std::log(e.value);
    rep.rows.push_back({sk, cfg.N_k, lg, lg - spec.log_scale(), 0});
  }
  RVec x(static_cast<Index>(rep.rows.size())), y(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    x[k] = std::pow(rep.rows[static_cast<size_t>(k)].sigma_k, 1.0 / base.theta);
    y[k] = rep.rows[static_cast<size_t>(k)].combination;
  }
  const LineFit f = fit_line(x, y);
  rep.rate = -f.slope;
  rep.intercept = f.intercept;
  rep.residual = f.rms;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  rep.lower_bound_holds = true;
  for (Index k = 0; k < x.size(); ++k) {
    auto& row = rep.rows[static_cast<size_t>(k)];
    row.fitted = f.intercept + f.slope * x[k];
    lo = std::min(lo, row.fitted);
    hi = std::max(hi, row.fitted);
    if (row.combination < row.fitted - 0.1 * std::abs(row.fitted)) rep.lower_bound_holds = false;
  }
  rep.fitted_range = hi - lo;
  return rep;
}

std::string GrowthSweepReport::csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "sigma_k,N_k,logE0,logET,T_star,flagged\n";
  for (const auto& p : points)
    os << p.sigma_k << ',' << p.N_k << ',' << p.log_E0 << ',' << p.log_ET << ',' << p.T_star << ','
       << (p.flagged ? 1 : 0) << '\n';
  os << "p,c,residual\n" << p << ',' << c << ',' << residual << '\n';
  return os.str();
}

void fit_growth_exponent(GrowthSweepReport& rep) {
  std::vector<double> xs, gs;
  for (const auto& pt : rep.points)
    if (!pt.flagged) {
      xs.push_back(pt.sigma_k);
      gs.push_back(pt.log_ET - pt.log_E0);
    }
  if (xs.size() < 3) throw NumericalError("growth sweep: fewer than three surviving points");
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 1450; ++k) {
    const double p = 0.05 + 0.001 * k;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      const double xp = std::pow(xs[i], p);
      sxy += xp * gs[i];
      sxx += xp * xp;
    }
    const double c = sxy / sxx;
    double res = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      const double d = gs[i] - c * std::pow(xs[i], p);
      res += d * d;
    }
    if (res < best) {
      best = res;
      rep.p = p;
      rep.c = c;
    }
  }
  rep.residual = std::sqrt(best / static_cast<double>(xs.size()));
}

namespace {

GrowthPoint run_growth_point(double model_sigma, const PacketSpec& base, double sk, double lambda,
                             const GrowthOptions& o) {
  GrowthPoint pt;
  pt.sigma_k = sk;
  pt.T_star = o.T_star;
  try {
    PacketSpec spec = base;
    spec.sigma_k = sk;
    const Grid g = packet_grid(sk, o.length_factor, o.xi_factor);
    const BumpCutoff h(o.theta_h);
    const Localizers loc(h, sk);
    const EnergyConfig cfg = make_energy_config(sk, lambda, o.theta1, o.theta_h, o.T_star);
    pt.N_k = cfg.N_k;
    if (cfg.truncated) pt.note = "N_k capped";
    const Field u0 = make_windowed_packet(spec, loc, g);
    pt.log_E0 = std::log(compute_energy(u0, cfg, loc).value);
    const bool closed_form = !o.drift_enabled || (model_sigma == 0 && o.use_exact_sigma0);
    auto solve = [&](double t) { return o.drift_enabled ? exact_sigma0_solution(u0, t) : free_propagate(u0, t); };
    if (closed_form) {
      pt.log_ET = std::log(compute_energy(solve(o.T_star), cfg, loc).value);
      for (int j = 0; o.trace_points > 0 && j <= o.trace_points; ++j) {
        const double t = o.T_star * j / o.trace_points;
        const EnergyResult e = compute_energy(solve(t), cfg, loc);
        pt.trace.times.push_back(t);
        pt.trace.log_E.push_back(std::log(e.value));
        pt.trace.terms.push_back(e.terms);
      }
    } else {
      EvolutionConfig ec;
      ec.t_final = o.T_star;
      ec.dt = o.drift_courant / g.max_frequency();
      if (o.trace_points > 0) {
        const double steps = std::ceil(o.T_star / ec.dt);
        ec.snapshot_stride = std::max(1, static_cast<int>(steps / o.trace_points));
      }
      if (o.absorber) {
        RVec w(g.size());
        for (Index i = 0; i < g.size(); ++i) w[i] = h((g.x(i) - 4 * sk) / (4 * sk));
        ec.absorber = std::move(w);
      }
      const TrajectoryRecord rec = evolve(u0, ModelParams{model_sigma}, ec);
      pt.log_ET = std::log(compute_energy(rec.final_state.field, cfg, loc).value) + rec.final_state.log_factor;
      if (o.trace_points > 0) pt.trace = energy_trace(rec, cfg, loc);
    }
    if (!std::isfinite(pt.log_E0) || !std::isfinite(pt.log_ET)) throw NumericalError("non-finite energy");
  } catch (const Error& e) {
    pt.flagged = true;
    pt.note = e.what();
  }
  return pt;
}

}  // namespace

GrowthSweepReport growth_sweep(double model_sigma, const PacketSpec& base, const std::vector<double>& sigma_list,
                               const GrowthOptions& o) {
  if (model_sigma < 0 || model_sigma >= 1) throw InvalidArgument("model sigma must lie in [0, 1)");
  const double lambda = o.lambda > 0 ? o.lambda : 0.5 * (1 - model_sigma);
  if (!(lambda < 1 - model_sigma)) throw InvalidArgument("growth sweep requires lambda < 1 - sigma");
  std::vector<double> sorted = sigma_list;
  std::sort(sorted.begin(), sorted.end());
  GrowthSweepReport rep;
  rep.model_sigma = model_sigma;
  rep.points.resize(sorted.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(sorted.size())));
  if (threads == 1) {
    for (size_t k = 0; k < sorted.size(); ++k) rep.points[k] = run_growth_point(model_sigma, base, sorted[k], lambda, o);
  } else {
    std::mutex m;
    size_t next = 0;
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          size_t k;
          {
            std::lock_guard lock(m);
            if (next >= sorted.size()) return;
            k = next++;
          }
          rep.points[k] = run_growth_point(model_sigma, base, sorted[k], lambda, o);
        }
      });
  }
  fit_growth_exponent(rep);
  return rep;
}

}  // namespace gevlab
