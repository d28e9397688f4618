#pragma once

#include "gpsearch/gp.hpp"
#include "gpsearch/types.hpp"

#include <deque>
#include <functional>
#include <limits>

namespace gpsearch {

/// L-BFGS history of (s, y) pairs with the curvature guard y.s > 1e-12;
/// updates failing the guard are skipped.
class LbfgsState {
 public:
  explicit LbfgsState(int capacity = 20) : capacity_(capacity) {}

  void update(const Vec& s, const Vec& y);
  void reset() { pairs_.clear(); }
  int history_size() const { return static_cast<int>(pairs_.size()); }
  bool curvature_ok() const;

  /// Two-loop recursion with H0 = (s.y)/(y.y) I; empty history returns -g.
  Vec direction(const Vec& gradient) const;

 private:
  int capacity_;
  std::deque<std::pair<Vec, Vec>> pairs_;
};

enum class LineSearch { none, quadratic };

struct LbfgsConfig {
  double tol = 1e-5;
  int max_iter = 1000;
  double max_step = std::numeric_limits<double>::infinity();
  LineSearch line_search = LineSearch::quadratic;
  int memory = 20;
};

struct LbfgsResult {
  Vec x;
  double value = 0.0;
  Vec gradient;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

/// Minimizes a (value, gradient) objective. The quadratic line search fits a
/// parabola through f(x), f'(x).d and the unit-step trial, which is exact on
/// quadratics; LineSearch::none takes the raw clipped step, costing exactly
/// one evaluation per iteration. Non-finite objectives abort with the state
/// reached so far.
LbfgsResult lbfgs_minimize(const std::function<ValueGradient(const Vec&)>& objective,
                           const Vec& x0, const LbfgsConfig& config);

/// Force-driven L-BFGS stepping for non-conservative force fields (dimer
/// translation, NEB relaxation): no line search, trial step from the two-loop
/// direction, clipped to max_step.
class LbfgsForceStepper {
 public:
  explicit LbfgsForceStepper(int memory = 20,
                             double max_step = std::numeric_limits<double>::infinity())
      : state_(memory), max_step_(max_step) {}

  /// Displacement toward smaller force given the force at x.
  Vec step(const Vec& x, const Vec& force);
  void reset();
  void set_max_step(double max_step) { max_step_ = max_step; }
  double max_step() const { return max_step_; }

 private:
  LbfgsState state_;
  Vec prev_x_, prev_g_;
  bool has_prev_ = false;
  double max_step_;
};

/// Polak-Ribiere direction with restart on negative beta:
/// beta = (f - f_prev).f / |f_prev|^2, d = f + max(beta, 0) d_prev.
Vec cg_direction_pr(const Vec& f_current, const Vec& f_previous,
                    const Vec& d_previous);

}  // namespace gpsearch
