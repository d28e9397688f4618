#pragma once

#include "gpsearch/gp.hpp"
#include "gpsearch/types.hpp"

#include <deque>
#include <set>
#include <string>
#include <vector>

namespace gpsearch {

enum class Metric { euclidean, emd, max1dlog };

Metric metric_from_string(const std::string& name);
std::string to_string(Metric metric);

/// Structural distance under the chosen metric. Non-molecular systems always
/// fall back to Euclidean.
double config_distance(Metric metric, const SystemInfo& sys, const Vec& x1,
                       const Vec& x2);

/// Greedy max-min farthest point sampling over the training set, seeded with
/// the forced indices (or the most recent point when none are forced). Ties
/// break toward the lowest index; output sorted ascending.
std::vector<int> fps_select(const TrainingData& data, Metric metric, int m_sub,
                            const std::set<int>& forced = {});

/// One FPS subset per image, drawn from the training points within `cutoff`
/// of that image under the metric. An empty ball falls back to the m_sub
/// nearest points.
std::vector<std::vector<int>> per_bead_fps(const TrainingData& data,
                                           const std::vector<Vec>& images,
                                           Metric metric, double cutoff,
                                           int m_sub,
                                           const std::set<int>& forced = {});

/// Sign-reversal diagnostic over a sliding window: the fraction of vector
/// components whose consecutive deltas have negative product, averaged over
/// the window. Histories shorter than 3 report no oscillation.
bool detect_oscillation(const std::deque<Vec>& history, int window = 5,
                        double threshold = 0.8);

struct TrustConfig {
  double t_min = 0.1;        // minimum trust radius (A)
  double dt_explore = 0.4;   // saturation amplitude (A)
  int n_half = 5;            // data half-life of the saturation curve
  double a_floor = 0.3;      // minimum physical ceiling (A)
  double a_atomic = 1.0;     // atomic length scale for the ceiling (A)
  Metric metric = Metric::euclidean;
};

/// Theta = min(T_min + dT (1 - 2^{-n/N_half}), max(a_floor, a_A / sqrt(N))).
double trust_threshold(int n_data, int n_atoms, const TrustConfig& cfg);

struct TrustCheck {
  bool accepted = false;
  Vec position;  // candidate when accepted, clipped point otherwise
};

/// Accepts the candidate when its distance to the nearest training point is
/// within theta; otherwise bisects along the straight segment from `anchor`
/// (the last accepted position) toward the candidate for the point where the
/// metric first reaches theta, to a tolerance of 1e-3 * theta.
TrustCheck check_trust(const Vec& candidate, const Vec& anchor,
                       const TrainingData& data, Metric metric, double theta);

/// L_max = (1 - r_limit) * d_min / 2 over the current minimum interatomic
/// distance; systems with fewer than two atoms are unlimited.
double max_step_length(const SystemInfo& sys, const Vec& x, double r_limit);

enum class AcquisitionKind { max_variance, ucb };

struct AcquisitionStrategy {
  AcquisitionKind kind = AcquisitionKind::ucb;
  double kappa = 2.0;
};

/// Picks the next image to evaluate from the unevaluated set: the largest
/// perpendicular uncertainty (max_variance) or the largest ||F|| + kappa *
/// sigma (ucb). Ties break toward the lowest index. Forces and uncertainties
/// must come from before the inner relaxation.
int select_image(const AcquisitionStrategy& strategy,
                 const std::vector<double>& force_norms,
                 const std::vector<double>& sigmas,
                 const std::vector<int>& unevaluated);

/// True when the oracle evaluation can be skipped (sigma strictly below the
/// gate); a zero gate never skips.
bool variance_gate(double sigma, double sigma_gate);

/// Uncertainty-augmented gradient norm used by inner-loop stopping rules.
double lcb_effective_gradient(double grad_norm, double sigma, double kappa);

}  // namespace gpsearch
