#pragma once

#include <string>
#include <vector>

#include "gevlab/cutoff.hpp"
#include "gevlab/evolution.hpp"
#include "gevlab/psido.hpp"

namespace gevlab {

struct PacketSpec {
  double rho0;
  double theta;
  double rho2;
  double s;
  double sigma_k;

  /// The amplitude factor exp(-rho2 4^{1/s} sigma_k^{1/s}) in log form.
  double log_scale() const;
  void validate() const;
};

/// Spectrum exactly exp(-rho0 <xi>^{1/theta}); rejects unresolved grids unless
/// check_resolution is off, in which case the spectrum is simply truncated.
Field make_phi(double rho0, double theta, const Grid& g, bool check_resolution = true);

/// exp(-rho2 4^{1/s} sigma_k^{1/s}) phi(x - 4 sigma_k) via the shift multiplier.
Field make_phi_k(const Field& phi, const PacketSpec& spec);

/// Phase-space localizers at scale sigma_k.
class Localizers {
 public:
  Localizers(BumpCutoff h, double sigma_k);

  double sigma_k() const { return sigma_; }
  const BumpCutoff& cutoff() const { return h_; }

  /// d_x^nu h^{(alpha)}((x - 4 sigma_k) / sigma_k).
  double x_factor(double x, int alpha, int nu = 0) const;
  /// d_xi^gamma h^{(beta)}((xi - sigma_k) / (sigma_k / 4)).
  double xi_factor(double xi, int beta, int gamma = 0) const;
  double chi(double xi) const;
  double psi(double x) const;

  /// w_k^{(alpha beta)}(x, xi) = x_factor(x, alpha) xi_factor(xi, beta), order 0.
  Symbol w(int alpha, int beta) const;

  /// Phase-space center (4 sigma_k, sigma_k) used to host symbols on small grids.
  PhaseShift center() const { return {4 * sigma_, sigma_}; }

 private:
  BumpCutoff h_;
  double sigma_;
};

struct LocalizerSupportReport {
  bool w_support_ok = true;     // w^{00} vanishes outside [3,5] sigma_k x [3/4, 5/4] sigma_k
  bool disjointness_ok = true;  // (1 - psi chi) w^{(alpha beta)} == 0 for alpha, beta <= n_max
  double peak = 0;              // w^{00} at the phase-space center
};

/// Exact checks on the grid's (x, xi) lattice. The symbols are products
/// f(x) g(xi) with 0 <= psi, chi <= 1, so the tensor check reduces exactly to
/// psi = 1 wherever an x factor is nonzero and chi = 1 wherever a xi factor is.
LocalizerSupportReport check_localizer_supports(const Localizers& loc, const Grid& g, int n_max,
                                                PhaseShift shift = {});

/// I_{2,k}(x, xi) = (<x>^{-sigma} xi - c0 <sigma_k>^{-sigma} sigma_k) psi_k(x) chi_k(xi),
/// c0 = 7^{-sigma} / 4; nonnegative on its support.
Symbol garding_symbol(const Localizers& loc, double sigma);

/// floor(sigma_k^{lambda/theta1}); rejects 0.
int compute_N_k(double sigma_k, double lambda, double theta1);

struct EnergyConfig {
  double lambda;
  double theta1;
  double theta_h;
  double sigma_k;
  int N_k;
  double T_star;
  bool truncated = false;  // N_k was capped at the cutoff's derivative order
};

EnergyConfig make_energy_config(double sigma_k, double lambda, double theta1, double theta_h, double T_star);

struct EnergyResult {
  double value = 0;
  Eigen::MatrixXd terms;  // unweighted |w^{(alpha beta)}(x,D) u|
};

/// (alpha! beta!)^{-theta1}, computed in log space.
double energy_weight(int alpha, int beta, double theta1);

/// Aggregate a term matrix.
double aggregate_energy(const Eigen::MatrixXd& terms, double theta1);

/// Localized energy through the separable structure w = a(x) b(xi):
/// w(x,D)u = a(x) (b(D)u).
EnergyResult compute_energy(const Field& u, const EnergyConfig& cfg, const Localizers& loc);

/// Same quantity through dense quantization of each w^{(alpha beta)};
/// the grid hosts phase space translated by shift.
EnergyResult compute_energy_dense(const Field& u, const EnergyConfig& cfg, const Localizers& loc,
                                  PhaseShift shift, QuantizeOptions opts = {});

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> log_E;
  std::vector<Eigen::MatrixXd> terms;  // relative to the snapshot's stored field
};

EnergyTrace energy_trace(const TrajectoryRecord& rec, const EnergyConfig& cfg, const Localizers& loc);

/// chi_k(D) phi_k: same E_k as phi_k since chi_k = 1 on the xi support of every
/// w^{(alpha beta)}, but band-limited, so it can live on a finite grid.
Field make_windowed_packet(const PacketSpec& spec, const Localizers& loc, const Grid& g);

/// Grid with L = length_factor sigma_k and Nyquist >= xi_factor sigma_k.
Grid packet_grid(double sigma_k, double length_factor, double xi_factor);

struct InitialEnergyRow {
  double sigma_k;
  int N_k;
  double log_E0;
  double combination;  // log E0 + rho2 4^{1/s} sigma_k^{1/s}
  double fitted;
};

struct InitialEnergyReport {
  std::vector<InitialEnergyRow> rows;
  double rate = 0;  // c in combination ~ intercept - c sigma_k^{1/theta}
  double intercept = 0;
  double residual = 0;
  double fitted_range = 0;
  bool lower_bound_holds = false;  // combination >= fitted - 10% |fitted|

  std::string csv() const;
};

InitialEnergyReport initial_energy_bound_check(const PacketSpec& spec, const std::vector<double>& sigma_list,
                                               double lambda, double theta1, double theta_h = 2.0);

struct GrowthOptions {
  double T_star = 0.1;
  double lambda = -1;  // negative: 0.5 (1 - sigma)
  double theta1 = 2.2;
  double theta_h = 2.0;
  bool drift_enabled = true;
  bool use_exact_sigma0 = true;  // closed-form solution when sigma = 0
  bool absorber = true;
  double length_factor = 8.0;
  double xi_factor = 3.0;
  double drift_courant = 0.45;  // dt max(<x>^-sigma |xi|)
  int trace_points = 0;         // > 0: record E_k at about this many times
  unsigned threads = 1;
};

struct GrowthPoint {
  double sigma_k = 0;
  int N_k = 0;
  double log_E0 = 0;
  double log_ET = 0;
  double T_star = 0;
  bool flagged = false;
  std::string note;
  EnergyTrace trace;
};

struct GrowthSweepReport {
  double model_sigma = 0;
  std::vector<GrowthPoint> points;
  double p = 0;
  double c = 0;
  double residual = 0;

  std::string csv() const;
};

/// Best p on a grid of exponents for G ~ c sigma_k^p (no intercept).
void fit_growth_exponent(GrowthSweepReport& report);

GrowthSweepReport growth_sweep(double model_sigma, const PacketSpec& base, const std::vector<double>& sigma_list,
                               const GrowthOptions& opts = {});

}  // namespace gevlab
