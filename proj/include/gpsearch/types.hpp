#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gpsearch {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Energy and its gradient at one configuration. Gradient length equals the
/// configuration dimension; forces are the negative gradient.
struct EnergyGradient {
  double energy = 0.0;
  Vec gradient;
};

/// Static description of the system a configuration vector refers to.
///
/// Model surfaces (Muller-Brown) set `molecular = false` and treat the
/// coordinates themselves as kernel features. Molecular systems set
/// `molecular = true` with dim = 3 * n_atoms and use inverse interatomic
/// distances as features.
struct SystemInfo {
  int dim = 0;
  bool molecular = false;
  std::vector<int> atom_types;     // per atom, only used when molecular
  std::vector<bool> frozen_atoms;  // per atom; empty means all free

  int n_atoms() const { return molecular ? dim / 3 : 0; }
  int n_pairs() const {
    const int n = n_atoms();
    return n * (n - 1) / 2;
  }
  /// Number of kernel features: inverse distances for molecules, raw
  /// coordinates for model surfaces.
  int n_features() const { return molecular ? n_pairs() : dim; }

  bool atom_frozen(int i) const {
    return !frozen_atoms.empty() && frozen_atoms[static_cast<size_t>(i)];
  }

  /// Dense pair-type index for every unordered pair in canonical order
  /// (i < j, row-major). Identical unordered element pairs share an index;
  /// indices are assigned in first-encounter order, so the mapping is
  /// deterministic for a fixed atom_types vector. Model surfaces map every
  /// coordinate to type 0.
  std::vector<int> pair_type_indices() const;
  int n_pair_types() const;
};

SystemInfo make_model_system(int dim);
SystemInfo make_molecular_system(std::vector<int> atom_types,
                                 std::vector<bool> frozen_atoms = {});

/// One row of a search trace. `event` tags the row: "oracle" rows are in
/// one-to-one correspondence with oracle calls; drivers add bookkeeping rows
/// such as "iteration", "trust_clip", "ci_on", "subset_grow".
struct TraceRow {
  int iteration = 0;
  long oracle_calls = 0;
  double max_force = 0.0;
  double energy = 0.0;
  std::string event;
};

using ConvergenceTrace = std::vector<TraceRow>;

}  // namespace gpsearch
