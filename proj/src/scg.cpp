#include "gpsearch/scg.hpp"

#include <cmath>
#include <limits>

namespace gpsearch {

ScgResult scg_optimize(const Objective& objective, const Vec& w0,
                       const ScgConfig& config) {
  const int n = static_cast<int>(w0.size());
  ScgResult res;
  res.w_best = w0;

  ValueGradient cur = objective(w0);
  res.f_best = cur.value;
  if (!std::isfinite(cur.value) || !cur.gradient.allFinite()) {
    res.f_best = cur.value;
    return res;  // unconverged at a non-finite start
  }

  Vec w = w0;
  Vec r = -cur.gradient;
  Vec p = r;
  double lambda = config.lambda_init;
  double lambda_bar = 0.0;
  bool success = true;
  double delta = 0.0;

  for (int k = 1; k <= config.max_iter; ++k) {
    const double norm_p2 = p.squaredNorm();
    if (norm_p2 < 1e-300) {
      res.converged = true;
      break;
    }
    if (success) {
      // Hessian-vector estimate along p from a short forward probe.
      const double sigma_k = config.sigma / std::sqrt(norm_p2);
      const ValueGradient probe = objective(w + sigma_k * p);
      if (std::isfinite(probe.value) && probe.gradient.allFinite()) {
        delta = p.dot((probe.gradient - cur.gradient) / sigma_k);
      } else {
        delta = -1.0;  // treat as indefinite, forces lambda growth
      }
    }
    delta += (lambda - lambda_bar) * norm_p2;
    if (delta <= 0.0) {
      lambda_bar = 2.0 * (lambda - delta / norm_p2);
      delta = -delta + lambda * norm_p2;
      lambda = lambda_bar;
    }
    const double mu = p.dot(r);
    if (mu <= 0.0) {
      // Direction lost descent; restart along the gradient.
      p = r;
      continue;
    }
    const double alpha = mu / delta;
    const Vec w_trial = w + alpha * p;
    const ValueGradient trial = objective(w_trial);
    const bool trial_ok =
        std::isfinite(trial.value) && trial.gradient.allFinite();
    const double comparison =
        trial_ok ? 2.0 * delta * (cur.value - trial.value) / (mu * mu) : -1.0;

    if (comparison >= 0.0) {
      const double f_prev = cur.value;
      w = w_trial;
      cur = trial;
      const Vec r_new = -cur.gradient;
      lambda_bar = 0.0;
      success = true;
      if (cur.value < res.f_best) {
        res.f_best = cur.value;
        res.w_best = w;
      }
      if (k % n == 0) {
        p = r_new;
      } else {
        const double beta = (r_new.squaredNorm() - r_new.dot(r)) / mu;
        p = r_new + beta * p;
      }
      r = r_new;
      if (comparison >= 0.75) lambda = std::max(lambda * 0.25, 1e-15);
      res.iterations = k;
      if (std::abs(f_prev - cur.value) < config.tol_f) {
        res.converged = true;
        break;
      }
    } else {
      lambda_bar = lambda;
      success = false;
    }
    if (comparison < 0.25) {
      lambda += delta * (1.0 - comparison) / norm_p2;
    }
    if (!std::isfinite(lambda) || lambda > 1e20) break;
  }
  return res;
}

}  // namespace gpsearch
