#pragma once

#include "gpsearch/active_learning.hpp"
#include "gpsearch/gp.hpp"
#include "gpsearch/rff.hpp"

#include <cstdint>
#include <deque>
#include <memory>

namespace gpsearch {

/// Knobs shared by every surrogate-driven search: kernel offsets and noise,
/// the MAP barrier, FPS subset selection with oscillation-triggered growth,
/// the trust region, and optional RFF prediction.
struct GpLoopConfig {
  double const_sigma2 = 0.0;  // 1.0 for molecular PES, 0.0 for model surfaces
  double noise = 1e-8;
  int scg_max_iter = 100;

  bool use_barrier = false;
  BarrierConfig barrier{};

  bool use_fps = false;
  int m_sub_init = 10;
  int m_sub_max = 30;
  int m_sub_grow = 2;
  int max_grow_retries = 3;
  bool grow_on_oscillation = false;
  int oscillation_window = 5;
  double oscillation_threshold = 0.8;

  TrustConfig trust{};
  bool adaptive_trust = false;
  double fixed_trust_radius = 0.5;

  bool use_rff = false;
  int d_rff = 200;
  std::uint64_t seed = 0;

  double lcb_kappa = 0.0;
  double sigma_gate = 0.0;  // 0 disables the oracle gate
};

/// One training step of the surrogate loop: FPS subset, MAP hyperparameters,
/// oscillation-triggered subset growth, then the prediction model over the
/// full data (exact GP or RFF). Owns the subset size and the hyperparameter
/// history across outer iterations.
class SurrogateTrainer {
 public:
  SurrogateTrainer(GpLoopConfig cfg, SystemInfo sys);

  struct Built {
    std::shared_ptr<const Surrogate> model;
    Hyperparameters hp;
    std::vector<int> subset;
    int growths = 0;  // subset growths triggered this call
  };

  Built build(const TrainingData& data, int outer_iteration);

  int subset_size() const { return m_sub_; }
  double trust_radius(const TrainingData& data) const;

 private:
  GpLoopConfig cfg_;
  SystemInfo sys_;
  std::deque<Vec> hp_history_;
  int m_sub_;
};

}  // namespace gpsearch
