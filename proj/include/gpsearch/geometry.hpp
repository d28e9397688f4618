#pragma once

#include "gpsearch/types.hpp"

namespace gpsearch {

/// Inverse interatomic distances phi_ij = 1/r_ij over all unordered pairs in
/// canonical order (i < j, row-major). Throws std::domain_error on coincident
/// atoms ("singular geometry").
Vec inverse_distances(const SystemInfo& sys, const Vec& x);

struct FeatureJacobianResult {
  Vec features;  // n_features
  Mat jacobian;  // n_features x dim
};

/// Features together with their Jacobian d phi / d x. For molecular systems
/// the row of pair (i,j) is nonzero only in the six columns of atoms i and j,
///   d phi_ij / d x_{i,a} = -(x_{i,a} - x_{j,a}) / r_ij^3
/// with the opposite sign for atom j; columns of frozen atoms are zeroed.
/// Model systems return the identity map.
FeatureJacobianResult feature_jacobian(const SystemInfo& sys, const Vec& x);

/// Solves the square linear assignment problem, returning the minimal total
/// cost; `assignment[row] = column`. O(n^3).
double hungarian_min_cost(const Mat& cost, std::vector<int>* assignment = nullptr);

enum class EmdMode { max_over_types, weighted_sum };

/// Structural distance between two configurations with the same multiset of
/// atom types. Per type, a linear assignment minimizes the summed Euclidean
/// displacement, averaged by 1/N_t; the result is the maximum per-type value
/// (default) or the weighted sum with unit weights.
double emd_distance(const Vec& x1, const std::vector<int>& types1,
                    const Vec& x2, const std::vector<int>& types2,
                    EmdMode mode = EmdMode::max_over_types);

double emd_distance(const SystemInfo& sys, const Vec& x1, const Vec& x2,
                    EmdMode mode = EmdMode::max_over_types);

/// max over pairs of |log(r_ij(x2) / r_ij(x1))|; scale-invariant.
double max1dlog_distance(const SystemInfo& sys, const Vec& x1, const Vec& x2);

struct RigidBasis {
  Mat vectors;      // dim x n_modes, orthonormal columns
  bool full_rank = true;  // false when degeneracy reduced the mode count

  int n_modes() const { return static_cast<int>(vectors.cols()); }
};

/// Orthonormal basis of rigid-body modes (translations then infinitesimal
/// rotations about the center of mass), Gram-Schmidt in the order
/// (t_x, t_y, t_z, r_x, r_y, r_z). Degenerate geometries (e.g. linear
/// molecules) drop rank-deficient vectors and clear `full_rank`.
RigidBasis rigid_body_basis(const SystemInfo& sys, const Vec& x);

/// v' = v - sum_k (v . u_k) u_k. Applied to translation steps only; the dimer
/// orientation vector must never pass through here.
Vec project_out_rigid(const Vec& v, const RigidBasis& basis);

}  // namespace gpsearch
