#include "gpsearch/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace gpsearch {

namespace {

struct FeaturePair {
  Vec f1, f2, r;          // features and their difference
  Mat j1, j2;             // feature Jacobians
  Vec theta2;             // per-feature theta^2
  std::vector<int> type;  // per-feature pair type
  double d2 = 0.0;        // sum theta^2 r^2
  double kval = 0.0;      // sigma_f^2 exp(-d2)
};

FeaturePair prepare(const Hyperparameters& hp, const SystemInfo& sys,
                    const Vec& x1, const Vec& x2, bool need_jacobians) {
  FeaturePair fp;
  fp.type = sys.pair_type_indices();
  if (static_cast<int>(fp.type.size()) != sys.n_features()) {
    throw std::logic_error("pair type table size mismatch");
  }
  if (hp.inv_lengthscales.size() < sys.n_pair_types()) {
    throw std::invalid_argument("too few inverse length scales for system");
  }
  if (need_jacobians) {
    auto r1 = feature_jacobian(sys, x1);
    auto r2 = feature_jacobian(sys, x2);
    fp.f1 = std::move(r1.features);
    fp.j1 = std::move(r1.jacobian);
    fp.f2 = std::move(r2.features);
    fp.j2 = std::move(r2.jacobian);
  } else {
    fp.f1 = sys.molecular ? inverse_distances(sys, x1) : x1;
    fp.f2 = sys.molecular ? inverse_distances(sys, x2) : x2;
  }
  const int nf = sys.n_features();
  fp.r = fp.f1 - fp.f2;
  fp.theta2.resize(nf);
  for (int i = 0; i < nf; ++i) {
    const double th = hp.inv_lengthscales[fp.type[static_cast<size_t>(i)]];
    fp.theta2[i] = th * th;
    fp.d2 += fp.theta2[i] * fp.r[i] * fp.r[i];
  }
  fp.kval = hp.signal_variance * std::exp(-fp.d2);
  return fp;
}

}  // namespace

double kernel_eval(const Hyperparameters& hp, const SystemInfo& sys,
                   const Vec& x1, const Vec& x2) {
  const FeaturePair fp = prepare(hp, sys, x1, x2, false);
  return hp.const_sigma2 + fp.kval;
}

KernelBlocks kernel_blocks(const Hyperparameters& hp, const SystemInfo& sys,
                           const Vec& x1, const Vec& x2) {
  const FeaturePair fp = prepare(hp, sys, x1, x2, true);
  const int nf = sys.n_features();

  const Vec u = fp.theta2.cwiseProduct(fp.r);
  const Vec dk_df2 = 2.0 * fp.kval * u;  // dk/dphi(x2)

  Mat h_feat(nf, nf);
  h_feat.noalias() = (-4.0 * fp.kval) * (u * u.transpose());
  h_feat.diagonal() += 2.0 * fp.kval * fp.theta2;

  KernelBlocks b;
  b.k_ee = fp.kval;
  b.k_ef = fp.j2.transpose() * dk_df2;
  b.k_fe = fp.j1.transpose() * (-dk_df2);
  b.k_ff = fp.j1.transpose() * h_feat * fp.j2;
  return b;
}

std::vector<KernelBlocks> kernel_blocks_theta_grad(const Hyperparameters& hp,
                                                   const SystemInfo& sys,
                                                   const Vec& x1, const Vec& x2) {
  const FeaturePair fp = prepare(hp, sys, x1, x2, true);
  const int nf = sys.n_features();
  const int n_types = sys.n_pair_types();

  const Vec u = fp.theta2.cwiseProduct(fp.r);

  // Per-type S_p = sum over that type's features of r^2, so that
  // d kval / d theta_p = -2 theta_p S_p kval.
  Vec s_per_type = Vec::Zero(n_types);
  for (int i = 0; i < nf; ++i) {
    s_per_type[fp.type[static_cast<size_t>(i)]] += fp.r[i] * fp.r[i];
  }

  std::vector<KernelBlocks> grads;
  grads.reserve(static_cast<size_t>(n_types));
  for (int p = 0; p < n_types; ++p) {
    const double theta_p = hp.inv_lengthscales[p];
    const double dkval = -2.0 * theta_p * s_per_type[p] * fp.kval;

    // d t_i / d theta_p = 2 theta_p for features of type p, else 0;
    // d u_i / d theta_p = 2 theta_p r_i on those features.
    Vec dt = Vec::Zero(nf);
    Vec du = Vec::Zero(nf);
    for (int i = 0; i < nf; ++i) {
      if (fp.type[static_cast<size_t>(i)] == p) {
        dt[i] = 2.0 * theta_p;
        du[i] = 2.0 * theta_p * fp.r[i];
      }
    }

    const Vec ddk_df2 = 2.0 * (dkval * u + fp.kval * du);

    Mat dh(nf, nf);
    dh.noalias() = (-4.0 * dkval) * (u * u.transpose());
    dh.noalias() += (-4.0 * fp.kval) * (du * u.transpose() + u * du.transpose());
    dh.diagonal() += 2.0 * (dkval * fp.theta2 + fp.kval * dt);

    KernelBlocks g;
    g.k_ee = dkval;
    g.k_ef = fp.j2.transpose() * ddk_df2;
    g.k_fe = fp.j1.transpose() * (-ddk_df2);
    g.k_ff = fp.j1.transpose() * dh * fp.j2;
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace gpsearch
