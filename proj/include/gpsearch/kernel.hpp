#pragma once

#include "gpsearch/geometry.hpp"
#include "gpsearch/types.hpp"

namespace gpsearch {

/// Kernel hyperparameters. Inverse length scales follow the code convention
/// without the 1/2 factor in the exponent, k = sigma_f^2 exp(-sum theta^2 dphi^2),
/// i.e. theta = 1 / (l * sqrt(2)) relative to the textbook SE length scale l.
/// The constant offset sigma_c^2 contributes only to energy-energy covariance
/// and is added at matrix assembly, not inside the blocks.
struct Hyperparameters {
  double signal_variance = 1.0;  // sigma_f^2
  Vec inv_lengthscales;          // theta_p, one per pair type
  double const_sigma2 = 0.0;     // sigma_c^2
  double noise_energy = 1e-8;    // sigma_E^2 (Tikhonov regularizer)
  double noise_force = 1e-8;     // sigma_F^2
};

/// The four covariance components between two configurations:
/// scalar energy-energy, the two energy-force cross vectors, and the
/// force-force matrix. sigma_c^2 is not included here.
struct KernelBlocks {
  double k_ee = 0.0;
  Vec k_ef;  // d k / d x2  (D)
  Vec k_fe;  // d k / d x1  (D)
  Mat k_ff;  // d^2 k / d x1 d x2^T  (D x D)
};

/// Kernel value sigma_c^2 + sigma_f^2 exp(-sum_p theta_p^2 (phi_p - phi_p')^2).
double kernel_eval(const Hyperparameters& hp, const SystemInfo& sys,
                   const Vec& x1, const Vec& x2);

/// All four derivative blocks, computed analytically: feature-space gradient
/// dk/dphi' = 2 k theta^2 r with r = phi(x1) - phi(x2), feature-space Hessian
/// H[i,j] = 2 k (theta_i^2 delta_ij - 2 u_i u_j) with u = theta^2 r, projected
/// to Cartesian space through the feature Jacobians.
KernelBlocks kernel_blocks(const Hyperparameters& hp, const SystemInfo& sys,
                           const Vec& x1, const Vec& x2);

/// Derivatives of the blocks with respect to each inverse length scale
/// theta_p (not log-space). Index p runs over pair types.
std::vector<KernelBlocks> kernel_blocks_theta_grad(const Hyperparameters& hp,
                                                   const SystemInfo& sys,
                                                   const Vec& x1, const Vec& x2);

}  // namespace gpsearch
