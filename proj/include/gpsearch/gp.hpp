#pragma once

#include "gpsearch/kernel.hpp"
#include "gpsearch/types.hpp"

#include <optional>
#include <vector>

namespace gpsearch {

/// Growing set of (configuration, energy, gradient) triples in insertion
/// order. Near-duplicate configurations (Euclidean distance < 1e-10) are
/// rejected to protect the conditioning of the covariance matrix.
class TrainingData {
 public:
  explicit TrainingData(SystemInfo sys) : sys_(std::move(sys)) {}

  /// Returns false (and does not insert) when x duplicates an existing point.
  bool add(const Vec& x, double energy, const Vec& gradient);

  int size() const { return static_cast<int>(configs_.size()); }
  int dim() const { return sys_.dim; }
  const SystemInfo& system() const { return sys_; }
  const std::vector<Vec>& configs() const { return configs_; }
  const std::vector<double>& energies() const { return energies_; }
  const std::vector<Vec>& gradients() const { return gradients_; }

  /// Observation vector: all energies first, then gradients config by config.
  Vec observations() const;

  TrainingData subset(std::vector<int> indices) const;

  /// Index of the training point nearest to x in Euclidean distance.
  int nearest_index(const Vec& x) const;

 private:
  SystemInfo sys_;
  std::vector<Vec> configs_;
  std::vector<double> energies_;
  std::vector<Vec> gradients_;
};

/// Logarithmic barrier keeping ln sigma_f^2 below lambda_max; the strength
/// grows linearly with the training set size, mu = min(mu0 + growth * M, mu_max).
struct BarrierConfig {
  double mu0 = 1e-4;
  double growth = 1e-3;
  double mu_max = 0.5;
  double lambda_max = 0.6931471805599453;  // ln 2

  double mu(int n_data) const;

  static BarrierConfig disabled() { return {0.0, 0.0, 0.0, 1e100}; }
};

/// Data-range initialization: sigma_f = 0.6745 * range(y) / 3 (squared), one
/// length scale per pair type from that type's feature range (falling back to
/// the global feature range when a type is degenerate). Zero ranges floor at
/// 1e-6. Length scales convert to inverse form theta = 1/(l sqrt(2)).
Hyperparameters init_hyperparameters(const TrainingData& data,
                                     double const_sigma2, double noise = 1e-8);

/// Full covariance over energy and force observations: M energy rows first,
/// then M*D force rows. sigma_c^2 is added to every energy-energy entry,
/// sigma_E^2 + jitter to the energy diagonal, sigma_F^2 + jitter to the force
/// diagonal. Entries below machine epsilon in magnitude are floored to zero.
Mat build_full_covariance(const Hyperparameters& hp, const TrainingData& data,
                          double jitter);

struct CholeskyResult {
  Mat l;               // lower-triangular factor of K + jitter*I
  double jitter_used;  // diagonal shift of the first successful attempt
};

/// Guarded factorization: tries jitter = 1e-8 * max(diag) growing tenfold per
/// retry, up to 8 retries. Throws std::runtime_error when the cap is hit.
CholeskyResult robust_cholesky(const Mat& k);

struct PredictiveVariance {
  double energy_mean = 0.0;
  Vec gradient_mean;
  double var_energy = 0.0;
  Vec var_gradient;
};

/// Common surface of the exact-GP and RFF surrogates.
class Surrogate {
 public:
  virtual ~Surrogate() = default;
  virtual EnergyGradient predict(const Vec& x) const = 0;
  virtual PredictiveVariance predict_with_variance(const Vec& x) const = 0;
};

/// Exact GP over energies and gradients: Cholesky factor and weight vector
/// over the full training data. Immutable once fitted; queries are const.
class ExactGpModel : public Surrogate {
 public:
  static ExactGpModel fit(const Hyperparameters& hp, const TrainingData& data);

  EnergyGradient predict(const Vec& x) const override;
  PredictiveVariance predict_with_variance(const Vec& x) const override;

  double jitter_used() const { return jitter_; }
  const Hyperparameters& hyperparameters() const { return hp_; }

 private:
  Hyperparameters hp_;
  SystemInfo sys_;
  std::vector<Vec> configs_;
  Mat chol_l_;
  Vec alpha_;
  double jitter_ = 0.0;
};

/// sqrt(sum_d var[dV/dx_d] (1 - tau_d^2)) for unit tau; the zero vector is
/// allowed and yields the total gradient uncertainty sigma_g.
double perpendicular_uncertainty(const PredictiveVariance& pv, const Vec& tau);
double perpendicular_uncertainty(const Surrogate& model, const Vec& x,
                                 const Vec& tau);

/// Optional log-space Gaussian penalty centered at the initialization.
struct LogSpacePrior {
  Vec center;
  Vec variance;
};

struct ValueGradient {
  double value = 0.0;
  Vec gradient;
};

/// Negative MAP objective in log-space parameters w = [ln sigma_f^2,
/// ln theta_1, ...]: value = NLL(w) - mu * log(lambda_max - ln sigma_f^2).
/// Infeasible points (barrier active and ln sigma_f^2 >= lambda_max) and
/// Cholesky failures return +infinity with a zero gradient. The gradient is
/// analytic through the trace identity plus the barrier term.
ValueGradient nll_and_grad(const Vec& w, const TrainingData& data,
                           double const_sigma2, double noise_energy,
                           double noise_force, double mu, double lambda_max,
                           const LogSpacePrior* prior = nullptr);

struct TrainOptions {
  double const_sigma2 = 0.0;
  double noise = 1e-8;
  BarrierConfig barrier = BarrierConfig::disabled();
  int scg_max_iter = 100;
  bool init_prior_penalty = false;  // off-by-default quadratic prior
  double init_prior_variance = 10.0;
};

/// MAP hyperparameter estimation on a data subset: initialize from the data
/// range, optimize the barrier-augmented NLL with SCG.
Hyperparameters train_hyperparameters(const TrainingData& subset,
                                      const TrainOptions& opts);

/// Train on `subset`, then factor the full data for prediction.
ExactGpModel train_model(const TrainingData& data,
                         const std::vector<int>& subset_indices,
                         const TrainOptions& opts);

}  // namespace gpsearch
