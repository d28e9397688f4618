#pragma once

#include "gpsearch/gp.hpp"
#include "gpsearch/types.hpp"

#include <functional>

namespace gpsearch {

using Objective = std::function<ValueGradient(const Vec&)>;

struct ScgConfig {
  int max_iter = 200;
  double tol_f = 1e-4;        // stop on |delta f| below this
  double lambda_init = 1e-6;  // initial scaling (model-trust) parameter
  double sigma = 1e-4;        // finite-difference probe length
};

struct ScgResult {
  Vec w_best;
  double f_best = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Moller's scaled conjugate gradient. Returns the best point seen. A
/// non-finite objective at w0 returns w0 unconverged; non-finite trial values
/// during the run count as failed steps and raise the scaling parameter.
ScgResult scg_optimize(const Objective& objective, const Vec& w0,
                       const ScgConfig& config);

}  // namespace gpsearch
