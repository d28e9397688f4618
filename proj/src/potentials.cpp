#include "gpsearch/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace gpsearch {

EnergyGradient muller_brown(const Vec& x) {
  if (x.size() != 2) {
    throw std::invalid_argument("muller_brown expects a 2-vector");
  }
  static constexpr double A[4] = {-200.0, -100.0, -170.0, 15.0};
  static constexpr double a[4] = {-1.0, -1.0, -6.5, 0.7};
  static constexpr double b[4] = {0.0, 0.0, 11.0, 0.6};
  static constexpr double c[4] = {-10.0, -10.0, -6.5, 0.7};
  static constexpr double x0[4] = {1.0, 0.0, -0.5, -1.0};
  static constexpr double y0[4] = {0.0, 0.5, 1.5, 1.0};

  EnergyGradient out;
  out.gradient = Vec::Zero(2);
  out.energy = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double dx = x[0] - x0[k];
    const double dy = x[1] - y0[k];
    const double term =
        A[k] * std::exp(a[k] * dx * dx + b[k] * dx * dy + c[k] * dy * dy);
    out.energy += term;
    out.gradient[0] += term * (2.0 * a[k] * dx + b[k] * dy);
    out.gradient[1] += term * (b[k] * dx + 2.0 * c[k] * dy);
  }
  return out;
}

namespace {

struct MorsePair {
  double q;   // Q(r)
  double j;   // J(r)
  double dq;  // dQ/dr
  double dj;  // dJ/dr
};

MorsePair leps_pair(double d, double alpha, double r0, double r) {
  const double e1 = std::exp(-alpha * (r - r0));
  const double e2 = e1 * e1;
  MorsePair p;
  p.q = d / 2.0 * (1.5 * e2 - e1);
  p.j = d / 4.0 * (e2 - 6.0 * e1);
  p.dq = d / 2.0 * (-3.0 * alpha * e2 + alpha * e1);
  p.dj = d / 4.0 * (-2.0 * alpha * e2 + 6.0 * alpha * e1);
  return p;
}

constexpr double kLepsA = 0.05;
constexpr double kLepsB = 0.30;
constexpr double kLepsC = 0.05;
constexpr double kLepsDab = 4.746;
constexpr double kLepsDbc = 4.746;
constexpr double kLepsDac = 3.445;
constexpr double kLepsAlpha = 1.942;
constexpr double kLepsR0 = 0.742;

}  // namespace

EnergyGradient leps(const Vec& x) {
  if (x.size() != 9) {
    throw std::invalid_argument("leps expects a 9-vector (3 atoms in 3D)");
  }
  const Eigen::Vector3d ra = x.segment<3>(0);
  const Eigen::Vector3d rb = x.segment<3>(3);
  const Eigen::Vector3d rc = x.segment<3>(6);

  const Eigen::Vector3d dab = ra - rb;
  const Eigen::Vector3d dbc = rb - rc;
  const Eigen::Vector3d dac = ra - rc;
  const double r_ab = dab.norm();
  const double r_bc = dbc.norm();
  const double r_ac = dac.norm();
  if (r_ab < 1e-12 || r_bc < 1e-12 || r_ac < 1e-12) {
    throw std::domain_error("singular geometry: coincident atoms");
  }

  const MorsePair p1 = leps_pair(kLepsDab, kLepsAlpha, kLepsR0, r_ab);
  const MorsePair p2 = leps_pair(kLepsDbc, kLepsAlpha, kLepsR0, r_bc);
  const MorsePair p3 = leps_pair(kLepsDac, kLepsAlpha, kLepsR0, r_ac);
  const double s1 = 1.0 + kLepsA;
  const double s2 = 1.0 + kLepsB;
  const double s3 = 1.0 + kLepsC;

  const double j1 = p1.j / s1;
  const double j2 = p2.j / s2;
  const double j3 = p3.j / s3;
  double w = j1 * j1 + j2 * j2 + j3 * j3 - j1 * j2 - j2 * j3 - j1 * j3;
  w = std::max(w, 1e-300);
  const double sqrt_w = std::sqrt(w);

  EnergyGradient out;
  out.energy = p1.q / s1 + p2.q / s2 + p3.q / s3 - sqrt_w;

  // dV/dr_k = dQ_k/dr / s_k - (2 j_k - j_m - j_n) (dJ_k/dr / s_k) / (2 sqrt W)
  const double dv_dr1 =
      p1.dq / s1 - (2.0 * j1 - j2 - j3) * (p1.dj / s1) / (2.0 * sqrt_w);
  const double dv_dr2 =
      p2.dq / s2 - (2.0 * j2 - j1 - j3) * (p2.dj / s2) / (2.0 * sqrt_w);
  const double dv_dr3 =
      p3.dq / s3 - (2.0 * j3 - j1 - j2) * (p3.dj / s3) / (2.0 * sqrt_w);

  out.gradient = Vec::Zero(9);
  const Eigen::Vector3d g_ab = dv_dr1 * dab / r_ab;
  const Eigen::Vector3d g_bc = dv_dr2 * dbc / r_bc;
  const Eigen::Vector3d g_ac = dv_dr3 * dac / r_ac;
  out.gradient.segment<3>(0) = g_ab + g_ac;
  out.gradient.segment<3>(3) = -g_ab + g_bc;
  out.gradient.segment<3>(6) = -g_bc - g_ac;
  return out;
}

EnergyGradient lennard_jones(const Vec& x, double epsilon, double sigma) {
  if (x.size() < 6 || x.size() % 3 != 0) {
    throw std::invalid_argument("lennard_jones expects 3N coordinates, N >= 2");
  }
  const int n = static_cast<int>(x.size()) / 3;
  EnergyGradient out;
  out.energy = 0.0;
  out.gradient = Vec::Zero(x.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Vector3d d = x.segment<3>(3 * i) - x.segment<3>(3 * j);
      const double r2 = d.squaredNorm();
      if (r2 < 1e-24) {
        throw std::domain_error("singular geometry: coincident atoms");
      }
      const double sr2 = sigma * sigma / r2;
      const double sr6 = sr2 * sr2 * sr2;
      const double sr12 = sr6 * sr6;
      out.energy += 4.0 * epsilon * (sr12 - sr6);
      // dV/dr = 4 eps (-12 sr12 + 6 sr6)/r ; gradient via d/r
      const double coeff = 4.0 * epsilon * (-12.0 * sr12 + 6.0 * sr6) / r2;
      out.gradient.segment<3>(3 * i) += coeff * d;
      out.gradient.segment<3>(3 * j) -= coeff * d;
    }
  }
  return out;
}

int PotentialSpec::dimension() const {
  switch (kind) {
    case PotentialKind::muller_brown:
      return 2;
    case PotentialKind::leps:
      return 9;
    case PotentialKind::lennard_jones: {
      const auto it = parameters.find("n_atoms");
      const int n = it == parameters.end() ? 2 : static_cast<int>(it->second);
      return 3 * n;
    }
    case PotentialKind::external: {
      const auto it = parameters.find("dim");
      return it == parameters.end() ? 0 : static_cast<int>(it->second);
    }
  }
  return 0;
}

SystemInfo PotentialSpec::system() const {
  switch (kind) {
    case PotentialKind::muller_brown:
      return make_model_system(2);
    case PotentialKind::leps:
      return make_molecular_system({0, 0, 0});
    case PotentialKind::lennard_jones:
      return make_molecular_system(std::vector<int>(
          static_cast<size_t>(dimension() / 3), 0));
    case PotentialKind::external: {
      const int d = dimension();
      if (d % 3 == 0 && d >= 6) {
        return make_molecular_system(std::vector<int>(static_cast<size_t>(d / 3), 0));
      }
      return make_model_system(d);
    }
  }
  return make_model_system(0);
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "muller_brown" || name == "mb") return PotentialKind::muller_brown;
  if (name == "leps") return PotentialKind::leps;
  if (name == "lennard_jones" || name == "lj") return PotentialKind::lennard_jones;
  if (name == "external") return PotentialKind::external;
  throw std::invalid_argument("unknown potential: " + name);
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::muller_brown:
      return "muller_brown";
    case PotentialKind::leps:
      return "leps";
    case PotentialKind::lennard_jones:
      return "lennard_jones";
    case PotentialKind::external:
      return "external";
  }
  return "?";
}

EnergyGradient Oracle::evaluate(const Vec& x) {
  EnergyGradient eg = eval_(x);
  if (eg.gradient.size() != x.size()) {
    throw std::runtime_error("oracle returned gradient of wrong dimension");
  }
  log_.push_back({x, eg.energy, eg.gradient});
  if (observer_) observer_(log_.back());
  return eg;
}

Oracle::Evaluator make_potential(const PotentialSpec& spec) {
  switch (spec.kind) {
    case PotentialKind::muller_brown:
      return [](const Vec& x) { return muller_brown(x); };
    case PotentialKind::leps:
      return [](const Vec& x) { return leps(x); };
    case PotentialKind::lennard_jones: {
      double eps = 1.0, sig = 1.0;
      if (auto it = spec.parameters.find("epsilon"); it != spec.parameters.end())
        eps = it->second;
      if (auto it = spec.parameters.find("sigma"); it != spec.parameters.end())
        sig = it->second;
      return [eps, sig](const Vec& x) { return lennard_jones(x, eps, sig); };
    }
    case PotentialKind::external:
      throw std::invalid_argument(
          "external potentials are built with external_oracle()");
  }
  throw std::invalid_argument("unknown potential kind");
}

std::unique_ptr<Oracle> counting_oracle(const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::external) {
    return external_oracle(spec.command);
  }
  return std::make_unique<Oracle>(make_potential(spec));
}

}  // namespace gpsearch
