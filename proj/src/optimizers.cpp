#include "gpsearch/optimizers.hpp"

#include <cmath>

namespace gpsearch {

void LbfgsState::update(const Vec& s, const Vec& y) {
  if (y.dot(s) <= 1e-12) return;  // curvature guard
  pairs_.emplace_back(s, y);
  while (static_cast<int>(pairs_.size()) > capacity_) pairs_.pop_front();
}

bool LbfgsState::curvature_ok() const {
  for (const auto& [s, y] : pairs_) {
    if (y.dot(s) <= 0.0) return false;
  }
  return true;
}

Vec LbfgsState::direction(const Vec& gradient) const {
  if (pairs_.empty()) return -gradient;
  const int k = static_cast<int>(pairs_.size());
  std::vector<double> alpha(static_cast<size_t>(k));
  Vec q = gradient;
  for (int i = k - 1; i >= 0; --i) {
    const auto& [s, y] = pairs_[static_cast<size_t>(i)];
    const double rho = 1.0 / y.dot(s);
    alpha[static_cast<size_t>(i)] = rho * s.dot(q);
    q -= alpha[static_cast<size_t>(i)] * y;
  }
  const auto& [s_last, y_last] = pairs_.back();
  q *= s_last.dot(y_last) / y_last.dot(y_last);
  for (int i = 0; i < k; ++i) {
    const auto& [s, y] = pairs_[static_cast<size_t>(i)];
    const double rho = 1.0 / y.dot(s);
    const double beta = rho * y.dot(q);
    q += (alpha[static_cast<size_t>(i)] - beta) * s;
  }
  return -q;
}

LbfgsResult lbfgs_minimize(
    const std::function<ValueGradient(const Vec&)>& objective, const Vec& x0,
    const LbfgsConfig& config) {
  LbfgsResult res;
  res.x = x0;
  ValueGradient cur = objective(x0);
  ++res.evaluations;
  res.value = cur.value;
  res.gradient = cur.gradient;
  if (!std::isfinite(cur.value) || !cur.gradient.allFinite()) return res;

  LbfgsState state(config.memory);
  for (int it = 0; it < config.max_iter; ++it) {
    if (cur.gradient.norm() < config.tol) {
      res.converged = true;
      break;
    }
    Vec d = state.direction(cur.gradient);
    if (d.dot(cur.gradient) >= 0.0) {  // not a descent direction
      state.reset();
      d = -cur.gradient;
    }
    const double dn = d.norm();
    if (dn > config.max_step) d *= config.max_step / dn;

    Vec x_new;
    ValueGradient next;
    if (config.line_search == LineSearch::quadratic) {
      const ValueGradient trial = objective(res.x + d);
      ++res.evaluations;
      const double slope = cur.gradient.dot(d);
      const double curvature_est = trial.value - cur.value - slope;
      double alpha = 1.0;
      if (std::isfinite(trial.value) && curvature_est > 0.0) {
        alpha = -slope / (2.0 * curvature_est);
      }
      const double alpha_cap = config.max_step / std::max(d.norm(), 1e-300);
      alpha = std::clamp(alpha, 1e-4, std::max(1.0, alpha_cap));
      if (std::abs(alpha - 1.0) < 1e-12 && std::isfinite(trial.value)) {
        x_new = res.x + d;
        next = trial;
      } else {
        x_new = res.x + alpha * d;
        next = objective(x_new);
        ++res.evaluations;
        if (!std::isfinite(next.value) ||
            (std::isfinite(trial.value) && trial.value < next.value)) {
          x_new = res.x + d;
          next = trial;
        }
      }
    } else {
      x_new = res.x + d;
      next = objective(x_new);
      ++res.evaluations;
    }
    if (!std::isfinite(next.value) || !next.gradient.allFinite()) break;

    state.update(x_new - res.x, next.gradient - cur.gradient);
    res.x = x_new;
    cur = next;
    res.value = cur.value;
    res.gradient = cur.gradient;
    res.iterations = it + 1;
  }
  if (cur.gradient.allFinite() && cur.gradient.norm() < config.tol) {
    res.converged = true;
  }
  return res;
}

Vec LbfgsForceStepper::step(const Vec& x, const Vec& force) {
  const Vec g = -force;
  if (has_prev_) {
    state_.update(x - prev_x_, g - prev_g_);
  }
  Vec d = state_.direction(g);
  if (d.dot(g) >= 0.0) {
    state_.reset();
    d = -g;
  }
  const double dn = d.norm();
  if (dn > max_step_) d *= max_step_ / dn;
  prev_x_ = x;
  prev_g_ = g;
  has_prev_ = true;
  return d;
}

void LbfgsForceStepper::reset() {
  state_.reset();
  has_prev_ = false;
}

Vec cg_direction_pr(const Vec& f_current, const Vec& f_previous,
                    const Vec& d_previous) {
  const double denom = f_previous.squaredNorm();
  if (denom <= 0.0 || d_previous.size() == 0) return f_current;
  const double beta = (f_current - f_previous).dot(f_current) / denom;
  return f_current + std::max(beta, 0.0) * d_previous;
}

}  // namespace gpsearch
