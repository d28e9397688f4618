#pragma once

#include "gpsearch/gp.hpp"

#include <cstdint>

namespace gpsearch {

struct SpectralSample {
  Mat frequencies;  // d_rff x n_features
  Vec phases;       // d_rff, in [0, 2pi)
  double amplitude = 0.0;  // sigma_f * sqrt(2 / d_rff)
};

/// Draws the spectral sample for the squared-exponential kernel in feature
/// space: each frequency component ~ Normal(0, 1) * sqrt(2) * theta_p for its
/// pair type, phases uniform in [0, 2pi). Reproducible per seed.
SpectralSample sample_spectral(const Hyperparameters& hp, const SystemInfo& sys,
                               int d_rff, std::uint64_t seed);

struct RffFeatures {
  Vec z;        // d_rff + 1 (trailing constant-kernel component)
  Mat jacobian; // (d_rff + 1) x dim
};

/// z_m = c cos(w_m . phi(x) + b_m) plus one constant component sqrt(sigma_c^2)
/// whose derivative row is zero; the Jacobian chains through the feature map.
RffFeatures rff_features(const SpectralSample& sample, double const_sigma2,
                         const SystemInfo& sys, const Vec& x);

/// Random-feature surrogate: Bayesian linear regression over energy and
/// gradient rows, weights solved from (Z^T Lambda Z + I) alpha = Z^T Lambda y.
class RffModel : public Surrogate {
 public:
  static RffModel build(const Hyperparameters& hp, const TrainingData& data,
                        int d_rff, std::uint64_t seed);

  EnergyGradient predict(const Vec& x) const override;
  PredictiveVariance predict_with_variance(const Vec& x) const override;

  const SpectralSample& spectral() const { return sample_; }
  std::uint64_t seed() const { return seed_; }

 private:
  SystemInfo sys_;
  SpectralSample sample_;
  double const_sigma2_ = 0.0;
  Vec alpha_;    // d_rff + 1
  Mat chol_a_;   // lower factor of A = Z^T Lambda Z + I
  std::uint64_t seed_ = 0;
};

}  // namespace gpsearch
