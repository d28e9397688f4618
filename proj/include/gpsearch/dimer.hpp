#pragma once

#include "gpsearch/active_learning.hpp"
#include "gpsearch/gp.hpp"
#include "gpsearch/gp_loop.hpp"
#include "gpsearch/potentials.hpp"
#include "gpsearch/types.hpp"

#include <cstdint>
#include <functional>

namespace gpsearch {

/// Dimer geometry: endpoints sit at midpoint +/- separation * orientation.
struct DimerState {
  Vec midpoint;
  Vec orientation;          // unit vector
  double separation = 0.01; // half-separation (A)
  double curvature = 0.0;   // current estimate along the orientation
};

struct DimerResult {
  bool converged = false;
  Vec midpoint;
  Vec orientation;
  double curvature = 0.0;
  long oracle_calls = 0;
  ConvergenceTrace trace;
};

/// Directional curvature from the endpoint force difference,
/// C = (F2 - F1) . N / (2 dR) for endpoints at midpoint +/- dR N. Exact for
/// linear force fields regardless of dR.
double curvature(const Vec& f1, const Vec& f2, const Vec& axis,
                 double separation);

/// Perpendicular component of the endpoint force difference,
/// (F2 - F1) - ((F2 - F1) . N) N; orthogonal to the axis.
Vec rotational_force(const Vec& f1, const Vec& f2, const Vec& axis);

/// Householder-reflected translation force: F - 2 (F.N) N when the curvature
/// is negative, -(F.N) N otherwise.
Vec translational_force(const Vec& f, const Vec& axis, double curvature);

/// Forces at arbitrary configurations, true PES or surrogate.
using ForceSource = std::function<EnergyGradient(const Vec&)>;

struct RotationConfig {
  double tol_angle = 0.0175;   // rad; stop when the predicted rotation is smaller
  double trial_angle = 0.3926990816987241;  // pi/8
  int max_rotations = 10;
};

/// Rotates the orientation toward the minimum-curvature mode using CG-PR
/// directions and the two-point curvature interpolation. Forces at the moved
/// endpoint come from `source` (one evaluation per rotation plus one on
/// entry); the midpoint force is supplied and the midpoint never moves.
/// Returns the number of rotations performed and leaves the updated
/// curvature in the state.
int rotate_dimer(DimerState& state, const Vec& midpoint_force,
                 const ForceSource& source, const RotationConfig& cfg);

struct DimerConfig {
  double force_tol = 0.1;   // eV/A on the true force
  double separation = 0.01;
  RotationConfig rotation{};
  int max_translations = 300;
  double max_step = 0.1;
  bool project_rigid = false;  // molecular translation steps only
  double r_limit = 0.0;        // min-distance step cap factor (molecular)
  int lbfgs_memory = 20;
};

DimerResult classical_dimer(Oracle& oracle, const SystemInfo& sys,
                            const Vec& x0, const Vec& orientation0,
                            const DimerConfig& cfg);

struct GpDimerConfig {
  DimerConfig dimer{};
  GpLoopConfig loop{};
  double phase1_tol_angle = 0.0873;       // ~5 degrees
  double phase1_successive_angle = 0.0349;  // ~2 degrees, between cycles
  int phase1_max_cycles = 5;
  double t_gp = 1e-3;        // surrogate force convergence threshold
  int max_outer = 120;
  int max_inner = 200;
  bool adaptive_t_gp = false;  // ramp t_gp = force_tol / divisor
  double divisor_max = 10.0;
  bool verify_curvature = false;
};

/// Two-phase surrogate dimer: true-PES rotations establish the minimum mode
/// and the initial training set, then each outer iteration trains the GP,
/// runs the full dimer on the surrogate until t_gp or a trust violation, and
/// validates with one oracle call at the proposed midpoint.
DimerResult gp_dimer(Oracle& oracle, const SystemInfo& sys, const Vec& x0,
                     const Vec& orientation0, const GpDimerConfig& cfg);

/// gp_dimer with the stabilizer stack: FPS hyperparameter subsets grown on
/// oscillation, the MAP variance barrier, the adaptive structural trust
/// region, the adaptive inner tolerance ramp, and optional RFF prediction
/// plus the variance gate.
DimerResult otgpd(Oracle& oracle, const SystemInfo& sys, const Vec& x0,
                  const Vec& orientation0, GpDimerConfig cfg);

}  // namespace gpsearch
