#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gevlab/grid.hpp"

namespace gevlab {

/// Decay exponent of the imaginary drift in D_t + D_x^2 + i<x>^{-sigma} D_x.
struct ModelParams {
  double sigma = 0;
};

struct EvolutionConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  double renorm_threshold = 600.0;
  int snapshot_stride = 0;  // 0: no snapshots
  bool drift_enabled = true;
  /// Optional window W(x) in [0, 1] multiplied into the field after every
  /// step; damps roundoff seeded far from the packet under study.
  std::optional<RVec> absorber;
};

struct Snapshot {
  double time;
  Field field;
  double log_factor;  // the physical field is exp(log_factor) * field
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> log_l2;
  std::vector<Snapshot> snapshots;
  Snapshot final_state;
  double max_boundary_fraction = 0;  // mass share in |x| > 3L/4 over recorded states

  std::string csv() const;
};

/// Multiplier e^{-i xi^2 t}.
Field free_propagate(const Field& g, double t);

/// i u_xx - i <x>^{-sigma} u_x.
Field model_rhs(const Field& u, const ModelParams& p);

/// Strang splitting: exact half-step dispersion, RK4 drift step with 2/3-rule
/// dealiasing, exact half-step dispersion.
TrajectoryRecord evolve(const Field& g, const ModelParams& p, const EvolutionConfig& cfg);

/// Multiplier e^{(xi - i xi^2) t}: the exact solution when sigma = 0.
Field exact_sigma0_solution(const Field& g, double t);

/// Header line with the log factor, then "x re im" rows.
std::string snapshot_text(const Snapshot& s);

}  // namespace gevlab
