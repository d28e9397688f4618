#include "gpsearch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace gpsearch {

namespace {

constexpr double kSingularDistance = 1e-12;

void check_molecular(const SystemInfo& sys, const Vec& x) {
  if (!sys.molecular) {
    throw std::invalid_argument("operation requires a molecular system");
  }
  if (x.size() != sys.dim) {
    throw std::invalid_argument("configuration dimension mismatch");
  }
}

}  // namespace

std::vector<int> SystemInfo::pair_type_indices() const {
  std::vector<int> out;
  if (!molecular) {
    out.assign(static_cast<size_t>(dim), 0);
    return out;
  }
  const int n = n_atoms();
  std::map<std::pair<int, int>, int> seen;
  out.reserve(static_cast<size_t>(n_pairs()));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int a = atom_types.empty() ? 0 : atom_types[static_cast<size_t>(i)];
      int b = atom_types.empty() ? 0 : atom_types[static_cast<size_t>(j)];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = seen.try_emplace({a, b}, static_cast<int>(seen.size()));
      out.push_back(it->second);
    }
  }
  return out;
}

int SystemInfo::n_pair_types() const {
  const auto idx = pair_type_indices();
  int m = 0;
  for (const int v : idx) m = std::max(m, v + 1);
  return std::max(m, 1);
}

SystemInfo make_model_system(int dim) {
  SystemInfo s;
  s.dim = dim;
  s.molecular = false;
  return s;
}

SystemInfo make_molecular_system(std::vector<int> atom_types,
                                 std::vector<bool> frozen_atoms) {
  SystemInfo s;
  s.molecular = true;
  s.dim = 3 * static_cast<int>(atom_types.size());
  s.atom_types = std::move(atom_types);
  s.frozen_atoms = std::move(frozen_atoms);
  return s;
}

Vec inverse_distances(const SystemInfo& sys, const Vec& x) {
  check_molecular(sys, x);
  const int n = sys.n_atoms();
  Vec phi(sys.n_pairs());
  int p = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = (x.segment<3>(3 * i) - x.segment<3>(3 * j)).norm();
      if (r < kSingularDistance) {
        throw std::domain_error("singular geometry: coincident atoms");
      }
      phi[p++] = 1.0 / r;
    }
  }
  return phi;
}

FeatureJacobianResult feature_jacobian(const SystemInfo& sys, const Vec& x) {
  FeatureJacobianResult out;
  if (!sys.molecular) {
    out.features = x;
    out.jacobian = Mat::Identity(sys.dim, sys.dim);
    return out;
  }
  check_molecular(sys, x);
  const int n = sys.n_atoms();
  out.features.resize(sys.n_pairs());
  out.jacobian = Mat::Zero(sys.n_pairs(), sys.dim);
  int p = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Vector3d d = x.segment<3>(3 * i) - x.segment<3>(3 * j);
      const double r = d.norm();
      if (r < kSingularDistance) {
        throw std::domain_error("singular geometry: coincident atoms");
      }
      out.features[p] = 1.0 / r;
      const Eigen::Vector3d g = -d / (r * r * r);
      if (!sys.atom_frozen(i)) {
        out.jacobian.block<1, 3>(p, 3 * i) = g.transpose();
      }
      if (!sys.atom_frozen(j)) {
        out.jacobian.block<1, 3>(p, 3 * j) = -g.transpose();
      }
      ++p;
    }
  }
  return out;
}

double hungarian_min_cost(const Mat& cost, std::vector<int>* assignment) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) {
    throw std::invalid_argument("hungarian: cost matrix must be square");
  }
  if (n == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Kuhn-Munkres with row/column potentials, 1-indexed internals.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  if (assignment) {
    assignment->assign(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
      if (p[j] > 0) (*assignment)[static_cast<size_t>(p[j] - 1)] = j - 1;
    }
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

double emd_distance(const Vec& x1, const std::vector<int>& types1,
                    const Vec& x2, const std::vector<int>& types2,
                    EmdMode mode) {
  if (x1.size() != x2.size() || types1.size() * 3 != static_cast<size_t>(x1.size()) ||
      types2.size() * 3 != static_cast<size_t>(x2.size())) {
    throw std::invalid_argument("emd_distance: dimension mismatch");
  }
  std::map<int, std::vector<int>> by_type1, by_type2;
  for (size_t i = 0; i < types1.size(); ++i) by_type1[types1[i]].push_back(static_cast<int>(i));
  for (size_t i = 0; i < types2.size(); ++i) by_type2[types2[i]].push_back(static_cast<int>(i));
  if (by_type1.size() != by_type2.size()) {
    throw std::invalid_argument("emd_distance: atom type multisets differ");
  }
  double result = 0.0;
  for (const auto& [type, idx1] : by_type1) {
    const auto it = by_type2.find(type);
    if (it == by_type2.end() || it->second.size() != idx1.size()) {
      throw std::invalid_argument("emd_distance: atom type multisets differ");
    }
    const auto& idx2 = it->second;
    const int nt = static_cast<int>(idx1.size());
    Mat cost(nt, nt);
    for (int a = 0; a < nt; ++a) {
      for (int b = 0; b < nt; ++b) {
        cost(a, b) = (x1.segment<3>(3 * idx1[static_cast<size_t>(a)]) -
                      x2.segment<3>(3 * idx2[static_cast<size_t>(b)]))
                         .norm();
      }
    }
    const double dt = hungarian_min_cost(cost) / nt;
    if (mode == EmdMode::max_over_types) {
      result = std::max(result, dt);
    } else {
      result += dt;  // unit weights
    }
  }
  return result;
}

double emd_distance(const SystemInfo& sys, const Vec& x1, const Vec& x2,
                    EmdMode mode) {
  if (!sys.molecular) {
    throw std::invalid_argument("emd_distance requires a molecular system");
  }
  std::vector<int> types = sys.atom_types;
  if (types.empty()) types.assign(static_cast<size_t>(sys.n_atoms()), 0);
  return emd_distance(x1, types, x2, types, mode);
}

double max1dlog_distance(const SystemInfo& sys, const Vec& x1, const Vec& x2) {
  check_molecular(sys, x1);
  const int n = sys.n_atoms();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r1 = (x1.segment<3>(3 * i) - x1.segment<3>(3 * j)).norm();
      const double r2 = (x2.segment<3>(3 * i) - x2.segment<3>(3 * j)).norm();
      if (r1 < kSingularDistance || r2 < kSingularDistance) {
        throw std::domain_error("singular geometry: coincident atoms");
      }
      worst = std::max(worst, std::abs(std::log(r2 / r1)));
    }
  }
  return worst;
}

RigidBasis rigid_body_basis(const SystemInfo& sys, const Vec& x) {
  check_molecular(sys, x);
  const int n = sys.n_atoms();
  const int dim = sys.dim;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) com += x.segment<3>(3 * i);
  com /= n;

  std::vector<Vec> raw;
  for (int axis = 0; axis < 3; ++axis) {
    Vec t = Vec::Zero(dim);
    for (int i = 0; i < n; ++i) t[3 * i + axis] = 1.0;
    raw.push_back(std::move(t));
  }
  // Infinitesimal rotations about the center of mass: r_k = e_k x (r - com).
  for (int axis = 0; axis < 3; ++axis) {
    Vec r = Vec::Zero(dim);
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[axis] = 1.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector3d rel = x.segment<3>(3 * i) - com;
      r.segment<3>(3 * i) = e.cross(rel);
    }
    raw.push_back(std::move(r));
  }

  RigidBasis basis;
  std::vector<Vec> kept;
  const double tol = 1e-8 * std::sqrt(static_cast<double>(n));
  for (auto& v : raw) {
    Vec w = v;
    for (const auto& u : kept) w -= u.dot(w) * u;
    const double norm = w.norm();
    if (norm > tol) {
      kept.push_back(w / norm);
    } else {
      basis.full_rank = false;
    }
  }
  basis.vectors.resize(dim, static_cast<int>(kept.size()));
  for (int k = 0; k < static_cast<int>(kept.size()); ++k) {
    basis.vectors.col(k) = kept[static_cast<size_t>(k)];
  }
  return basis;
}

Vec project_out_rigid(const Vec& v, const RigidBasis& basis) {
  if (basis.n_modes() == 0) return v;
  return v - basis.vectors * (basis.vectors.transpose() * v);
}

}  // namespace gpsearch
