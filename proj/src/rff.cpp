#include "gpsearch/rff.hpp"

#include "gpsearch/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gpsearch {

SpectralSample sample_spectral(const Hyperparameters& hp, const SystemInfo& sys,
                               int d_rff, std::uint64_t seed) {
  if (d_rff < 1) throw std::invalid_argument("sample_spectral: d_rff >= 1");
  const int nf = sys.n_features();
  const auto types = sys.pair_type_indices();
  Rng rng(seed);
  SpectralSample s;
  s.frequencies.resize(d_rff, nf);
  // Column-by-column (per feature) so the stream layout matches the sampling
  // order of the per-feature scales.
  for (int f = 0; f < nf; ++f) {
    const double scale =
        std::numbers::sqrt2 * hp.inv_lengthscales[types[static_cast<size_t>(f)]];
    for (int i = 0; i < d_rff; ++i) {
      s.frequencies(i, f) = rng.normal() * scale;
    }
  }
  s.phases.resize(d_rff);
  for (int i = 0; i < d_rff; ++i) {
    s.phases[i] = rng.uniform() * 2.0 * std::numbers::pi;
  }
  s.amplitude = std::sqrt(hp.signal_variance) * std::sqrt(2.0 / d_rff);
  return s;
}

RffFeatures rff_features(const SpectralSample& sample, double const_sigma2,
                         const SystemInfo& sys, const Vec& x) {
  const int d_rff = static_cast<int>(sample.phases.size());
  const auto feat = feature_jacobian(sys, x);

  const Vec arg = sample.frequencies * feat.features + sample.phases;
  RffFeatures out;
  out.z.resize(d_rff + 1);
  out.jacobian = Mat::Zero(d_rff + 1, sys.dim);
  // d z_m / d x = -c sin(arg_m) * (w_m . dphi/dx)
  const Mat w_jac = sample.frequencies * feat.jacobian;  // d_rff x dim
  for (int m = 0; m < d_rff; ++m) {
    out.z[m] = sample.amplitude * std::cos(arg[m]);
    out.jacobian.row(m) = -sample.amplitude * std::sin(arg[m]) * w_jac.row(m);
  }
  out.z[d_rff] = std::sqrt(std::max(0.0, const_sigma2));
  return out;
}

RffModel RffModel::build(const Hyperparameters& hp, const TrainingData& data,
                         int d_rff, std::uint64_t seed) {
  if (data.size() < 1) throw std::invalid_argument("RffModel::build: no data");
  RffModel model;
  model.sys_ = data.system();
  model.sample_ = sample_spectral(hp, model.sys_, d_rff, seed);
  model.const_sigma2_ = hp.const_sigma2;
  model.seed_ = seed;

  const int m = data.size();
  const int d = data.dim();
  const int d_eff = d_rff + 1;
  const int n_obs = m * (1 + d);

  Mat z(n_obs, d_eff);
  for (int i = 0; i < m; ++i) {
    const RffFeatures f = rff_features(model.sample_, hp.const_sigma2,
                                       model.sys_, data.configs()[static_cast<size_t>(i)]);
    z.row(i) = f.z.transpose();
    z.block(m + i * d, 0, d, d_eff) = f.jacobian.transpose();
  }

  Vec prec(n_obs);
  prec.head(m).setConstant(1.0 / hp.noise_energy);
  prec.tail(n_obs - m).setConstant(1.0 / hp.noise_force);

  const Vec y = data.observations();
  const Mat zl = prec.cwiseSqrt().asDiagonal() * z;
  Mat a = zl.transpose() * zl;
  a.diagonal().array() += 1.0;
  const Vec rhs = z.transpose() * prec.cwiseProduct(y).matrix();

  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) {
    const auto guarded = robust_cholesky(a);
    model.chol_a_ = guarded.l;
  } else {
    model.chol_a_ = llt.matrixL();
  }
  model.alpha_ = model.chol_a_.triangularView<Eigen::Lower>().solve(rhs);
  model.chol_a_.transpose().triangularView<Eigen::Upper>().solveInPlace(
      model.alpha_);
  return model;
}

EnergyGradient RffModel::predict(const Vec& x) const {
  const RffFeatures f = rff_features(sample_, const_sigma2_, sys_, x);
  EnergyGradient out;
  out.energy = f.z.dot(alpha_);
  out.gradient = f.jacobian.transpose() * alpha_;
  return out;
}

PredictiveVariance RffModel::predict_with_variance(const Vec& x) const {
  const RffFeatures f = rff_features(sample_, const_sigma2_, sys_, x);
  PredictiveVariance out;
  out.energy_mean = f.z.dot(alpha_);
  out.gradient_mean = f.jacobian.transpose() * alpha_;

  // var = v^T A^-1 v through the stored factor; non-negative by construction.
  const Vec ve = chol_a_.triangularView<Eigen::Lower>().solve(f.z);
  out.var_energy = ve.squaredNorm();
  out.var_gradient.resize(sys_.dim);
  const Mat vg =
      chol_a_.triangularView<Eigen::Lower>().solve(f.jacobian.transpose());
  for (int i = 0; i < sys_.dim; ++i) {
    out.var_gradient[i] = vg.col(i).squaredNorm();
  }
  return out;
}

}  // namespace gpsearch
