#include "gpsearch/gp.hpp"

#include "gpsearch/scg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gpsearch {

namespace {

constexpr double kDuplicateTol = 1e-10;
constexpr double kRangeFloor = 1e-6;
constexpr double kInitQuantile = 0.6745;  // Phi^{-1}(0.75)

Hyperparameters hp_from_log(const Vec& w, double const_sigma2,
                            double noise_energy, double noise_force) {
  Hyperparameters hp;
  hp.signal_variance = std::exp(w[0]);
  hp.inv_lengthscales = w.tail(w.size() - 1).array().exp();
  hp.const_sigma2 = const_sigma2;
  hp.noise_energy = noise_energy;
  hp.noise_force = noise_force;
  return hp;
}

/// Pure kernel covariance (no constant offset, noise, or jitter). When
/// `theta_grads` is non-null it is filled with dK/d theta_p per pair type.
Mat assemble_kernel_matrix(const Hyperparameters& hp, const TrainingData& data,
                           std::vector<Mat>* theta_grads = nullptr) {
  const int m = data.size();
  const int d = data.dim();
  const int total = m * (1 + d);
  const int n_types = data.system().n_pair_types();
  Mat k = Mat::Zero(total, total);
  if (theta_grads) {
    theta_grads->assign(static_cast<size_t>(n_types), Mat::Zero(total, total));
  }

  auto place = [&](Mat& target, int i, int j, const KernelBlocks& b) {
    const int fi = m + i * d;
    const int fj = m + j * d;
    target(i, j) = b.k_ee;
    target.block(i, fj, 1, d) = b.k_ef.transpose();
    target.block(fi, j, d, 1) = b.k_fe;
    target.block(fi, fj, d, d) = b.k_ff;
    if (i != j) {
      target(j, i) = b.k_ee;
      target.block(j, fi, 1, d) = b.k_ef.transpose();
      target.block(fj, i, d, 1) = b.k_fe;
      target.block(fj, fi, d, d) = b.k_ff.transpose();
    }
  };

  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const KernelBlocks b = kernel_blocks(hp, data.system(), data.configs()[i],
                                           data.configs()[j]);
      place(k, i, j, b);
      if (theta_grads) {
        const auto gs = kernel_blocks_theta_grad(
            hp, data.system(), data.configs()[i], data.configs()[j]);
        for (int p = 0; p < n_types; ++p) {
          place((*theta_grads)[static_cast<size_t>(p)], i, j, gs[static_cast<size_t>(p)]);
        }
      }
    }
  }
  return k;
}

/// Cross-covariance rows of a query against all observations: first row is
/// the query energy, the remaining d rows its gradient components. The
/// constant offset couples energy rows only.
Mat cross_covariance(const Hyperparameters& hp, const SystemInfo& sys,
                     const std::vector<Vec>& configs, const Vec& x) {
  const int m = static_cast<int>(configs.size());
  const int d = sys.dim;
  Mat k_star(1 + d, m * (1 + d));
  for (int i = 0; i < m; ++i) {
    const KernelBlocks b = kernel_blocks(hp, sys, x, configs[static_cast<size_t>(i)]);
    k_star(0, i) = b.k_ee + hp.const_sigma2;
    k_star.block(0, m + i * d, 1, d) = b.k_ef.transpose();
    k_star.block(1, i, d, 1) = b.k_fe;
    k_star.block(1, m + i * d, d, d) = b.k_ff;
  }
  return k_star;
}

}  // namespace

bool TrainingData::add(const Vec& x, double energy, const Vec& gradient) {
  if (x.size() != sys_.dim || gradient.size() != sys_.dim) {
    throw std::invalid_argument("training point dimension mismatch");
  }
  for (const auto& c : configs_) {
    if ((c - x).norm() < kDuplicateTol) return false;
  }
  configs_.push_back(x);
  energies_.push_back(energy);
  gradients_.push_back(gradient);
  return true;
}

Vec TrainingData::observations() const {
  const int m = size();
  const int d = dim();
  Vec y(m * (1 + d));
  for (int i = 0; i < m; ++i) y[i] = energies_[static_cast<size_t>(i)];
  for (int i = 0; i < m; ++i) {
    y.segment(m + i * d, d) = gradients_[static_cast<size_t>(i)];
  }
  return y;
}

TrainingData TrainingData::subset(std::vector<int> indices) const {
  std::sort(indices.begin(), indices.end());
  TrainingData out(sys_);
  for (const int i : indices) {
    out.configs_.push_back(configs_.at(static_cast<size_t>(i)));
    out.energies_.push_back(energies_.at(static_cast<size_t>(i)));
    out.gradients_.push_back(gradients_.at(static_cast<size_t>(i)));
  }
  return out;
}

int TrainingData::nearest_index(const Vec& x) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double d = (configs_[static_cast<size_t>(i)] - x).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double BarrierConfig::mu(int n_data) const {
  return std::min(mu0 + growth * n_data, mu_max);
}

Hyperparameters init_hyperparameters(const TrainingData& data,
                                     double const_sigma2, double noise) {
  if (data.size() < 1) {
    throw std::invalid_argument("init_hyperparameters needs data");
  }
  const auto& energies = data.energies();
  const auto [emin, emax] = std::minmax_element(energies.begin(), energies.end());
  const double sigma_f = kInitQuantile * (*emax - *emin) / 3.0;

  Hyperparameters hp;
  hp.signal_variance = std::max(sigma_f * sigma_f, kRangeFloor);
  hp.const_sigma2 = const_sigma2;
  hp.noise_energy = noise;
  hp.noise_force = noise;

  const auto& sys = data.system();
  const int n_types = sys.n_pair_types();
  const auto types = sys.pair_type_indices();
  const int nf = sys.n_features();

  Vec fmin = Vec::Constant(nf, std::numeric_limits<double>::infinity());
  Vec fmax = Vec::Constant(nf, -std::numeric_limits<double>::infinity());
  for (const auto& x : data.configs()) {
    const Vec phi = sys.molecular ? inverse_distances(sys, x) : x;
    fmin = fmin.cwiseMin(phi);
    fmax = fmax.cwiseMax(phi);
  }
  Vec type_range = Vec::Zero(n_types);
  double global_range = 0.0;
  for (int i = 0; i < nf; ++i) {
    const double r = fmax[i] - fmin[i];
    auto& tr = type_range[types[static_cast<size_t>(i)]];
    tr = std::max(tr, r);
    global_range = std::max(global_range, r);
  }
  hp.inv_lengthscales.resize(n_types);
  for (int p = 0; p < n_types; ++p) {
    double range = type_range[p] > 0.0 ? type_range[p] : global_range;
    const double l = std::max(kInitQuantile * range / 3.0, kRangeFloor);
    hp.inv_lengthscales[p] = 1.0 / (l * std::numbers::sqrt2);
  }
  return hp;
}

Mat build_full_covariance(const Hyperparameters& hp, const TrainingData& data,
                          double jitter) {
  const int m = data.size();
  const int d = data.dim();
  Mat k = assemble_kernel_matrix(hp, data);
  k.topLeftCorner(m, m).array() += hp.const_sigma2;
  for (int i = 0; i < m; ++i) k(i, i) += hp.noise_energy + jitter;
  for (int i = m; i < m * (1 + d); ++i) k(i, i) += hp.noise_force + jitter;
  // Floor sub-epsilon entries.
  const double eps = std::numeric_limits<double>::epsilon();
  k = (k.array().abs() < eps).select(0.0, k);
  return k;
}

CholeskyResult robust_cholesky(const Mat& k) {
  const double max_diag = k.diagonal().maxCoeff();
  double jitter = 1e-8 * std::max(max_diag, 1.0e-30);
  constexpr int kRetries = 8;
  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    Mat shifted = k;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return {Mat(llt.matrixL()), jitter};
    }
    jitter *= 10.0;
  }
  throw std::runtime_error(
      "robust_cholesky: matrix not positive definite after jitter escalation "
      "(max diag " + std::to_string(max_diag) + ")");
}

ExactGpModel ExactGpModel::fit(const Hyperparameters& hp,
                               const TrainingData& data) {
  if (data.size() < 1) {
    throw std::invalid_argument("ExactGpModel::fit needs at least one point");
  }
  ExactGpModel model;
  model.hp_ = hp;
  model.sys_ = data.system();
  model.configs_ = data.configs();
  const Mat k = build_full_covariance(hp, data, 0.0);
  auto chol = robust_cholesky(k);
  model.chol_l_ = std::move(chol.l);
  model.jitter_ = chol.jitter_used;
  const Vec y = data.observations();
  model.alpha_ = model.chol_l_.triangularView<Eigen::Lower>().solve(y);
  model.chol_l_.transpose().triangularView<Eigen::Upper>().solveInPlace(
      model.alpha_);
  return model;
}

EnergyGradient ExactGpModel::predict(const Vec& x) const {
  const Mat k_star = cross_covariance(hp_, sys_, configs_, x);
  const Vec mean = k_star * alpha_;
  EnergyGradient out;
  out.energy = mean[0];
  out.gradient = mean.tail(sys_.dim);
  return out;
}

PredictiveVariance ExactGpModel::predict_with_variance(const Vec& x) const {
  const Mat k_star = cross_covariance(hp_, sys_, configs_, x);
  const Vec mean = k_star * alpha_;

  // Prior covariance of the query block: k(x,x) for the energy and the
  // diagonal of the force-force block for the gradient.
  const KernelBlocks self = kernel_blocks(hp_, sys_, x, x);
  PredictiveVariance out;
  out.energy_mean = mean[0];
  out.gradient_mean = mean.tail(sys_.dim);

  const Mat v =
      chol_l_.triangularView<Eigen::Lower>().solve(k_star.transpose());
  const Vec reduction = v.colwise().squaredNorm();
  out.var_energy =
      std::max(0.0, hp_.const_sigma2 + self.k_ee - reduction[0]);
  out.var_gradient.resize(sys_.dim);
  for (int i = 0; i < sys_.dim; ++i) {
    out.var_gradient[i] = std::max(0.0, self.k_ff(i, i) - reduction[1 + i]);
  }
  return out;
}

double perpendicular_uncertainty(const PredictiveVariance& pv, const Vec& tau) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < pv.var_gradient.size(); ++i) {
    const double t = tau.size() == 0 ? 0.0 : tau[i];
    s += pv.var_gradient[i] * (1.0 - t * t);
  }
  return std::sqrt(std::max(0.0, s));
}

double perpendicular_uncertainty(const Surrogate& model, const Vec& x,
                                 const Vec& tau) {
  return perpendicular_uncertainty(model.predict_with_variance(x), tau);
}

ValueGradient nll_and_grad(const Vec& w, const TrainingData& data,
                           double const_sigma2, double noise_energy,
                           double noise_force, double mu, double lambda_max,
                           const LogSpacePrior* prior) {
  const int n_params = static_cast<int>(w.size());
  ValueGradient out;
  out.value = std::numeric_limits<double>::infinity();
  out.gradient = Vec::Zero(n_params);

  if (mu > 0.0 && w[0] >= lambda_max) return out;  // infeasible

  const Hyperparameters hp =
      hp_from_log(w, const_sigma2, noise_energy, noise_force);
  std::vector<Mat> theta_grads;
  const Mat s = assemble_kernel_matrix(hp, data, &theta_grads);

  const int m = data.size();
  const int total = m * (1 + data.dim());
  Mat k = s;
  k.topLeftCorner(m, m).array() += const_sigma2;
  for (int i = 0; i < m; ++i) k(i, i) += noise_energy;
  for (int i = m; i < total; ++i) k(i, i) += noise_force;

  Eigen::LLT<Mat> llt(k);
  if (llt.info() != Eigen::Success) return out;  // reject infeasible region

  const Vec y = data.observations();
  const Vec alpha = llt.solve(y);
  const Mat l = llt.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < total; ++i) log_det += std::log(l(i, i));

  double value = 0.5 * y.dot(alpha) + log_det +
                 0.5 * total * std::log(2.0 * std::numbers::pi);

  const Mat k_inv = llt.solve(Mat::Identity(total, total));

  // d NLL / d w_j = -1/2 [ alpha^T dK alpha - tr(K^-1 dK) ].
  auto nll_grad_for = [&](const Mat& dk) {
    const double quad = alpha.dot(dk * alpha);
    const double trace = (k_inv.cwiseProduct(dk)).sum();
    return -0.5 * (quad - trace);
  };

  Vec grad(n_params);
  grad[0] = nll_grad_for(s);  // the kernel part scales with sigma_f^2
  for (int p = 0; p < n_params - 1; ++p) {
    const double theta_p = hp.inv_lengthscales[p];
    grad[1 + p] = nll_grad_for(theta_grads[static_cast<size_t>(p)]) * theta_p;
  }

  if (mu > 0.0) {
    value -= mu * std::log(lambda_max - w[0]);
    grad[0] += mu / (lambda_max - w[0]);
  }
  if (prior) {
    for (int j = 0; j < n_params; ++j) {
      const double d = w[j] - prior->center[j];
      value += 0.5 * d * d / prior->variance[j];
      grad[j] += d / prior->variance[j];
    }
  }

  out.value = value;
  out.gradient = grad;
  return out;
}

Hyperparameters train_hyperparameters(const TrainingData& subset,
                                      const TrainOptions& opts) {
  if (subset.size() < 1) {
    throw std::invalid_argument("train_hyperparameters: empty subset");
  }
  Hyperparameters hp = init_hyperparameters(subset, opts.const_sigma2, opts.noise);
  const int n_types = static_cast<int>(hp.inv_lengthscales.size());

  Vec w0(1 + n_types);
  w0[0] = std::log(hp.signal_variance);
  for (int p = 0; p < n_types; ++p) {
    w0[1 + p] = std::log(hp.inv_lengthscales[p]);
  }

  LogSpacePrior prior;
  if (opts.init_prior_penalty) {
    prior.center = w0;
    prior.variance = Vec::Constant(w0.size(), opts.init_prior_variance);
  }
  const double mu = opts.barrier.mu(subset.size());

  const Objective objective = [&](const Vec& w) {
    return nll_and_grad(w, subset, opts.const_sigma2, opts.noise, opts.noise,
                        mu, opts.barrier.lambda_max,
                        opts.init_prior_penalty ? &prior : nullptr);
  };

  ScgConfig scg;
  scg.max_iter = opts.scg_max_iter;
  const ScgResult res = scg_optimize(objective, w0, scg);
  if (res.f_best < std::numeric_limits<double>::infinity()) {
    hp.signal_variance = std::exp(res.w_best[0]);
    for (int p = 0; p < n_types; ++p) {
      hp.inv_lengthscales[p] = std::exp(res.w_best[1 + p]);
    }
  }
  return hp;
}

ExactGpModel train_model(const TrainingData& data,
                         const std::vector<int>& subset_indices,
                         const TrainOptions& opts) {
  const TrainingData sub = data.subset(subset_indices);
  const Hyperparameters hp = train_hyperparameters(sub, opts);
  return ExactGpModel::fit(hp, data);
}

}  // namespace gpsearch
