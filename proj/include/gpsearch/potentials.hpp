#pragma once

#include "gpsearch/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>

namespace gpsearch {

/// Muller-Brown 2D test surface: sum of four Gaussians with the standard
/// published parameterization. Three minima, two first-order saddles.
EnergyGradient muller_brown(const Vec& x);

/// Collinear-form LEPS surface for three atoms in full 9D Cartesian space.
/// Energy depends only on the pairwise distances r_AB, r_BC, r_AC. Throws
/// std::domain_error on coincident atoms.
EnergyGradient leps(const Vec& x);

/// Standard 12-6 Lennard-Jones pair sum over N >= 2 atoms.
EnergyGradient lennard_jones(const Vec& x, double epsilon = 1.0,
                             double sigma = 1.0);

enum class PotentialKind { muller_brown, leps, lennard_jones, external };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::muller_brown;
  std::map<std::string, double> parameters;  // epsilon, sigma, n_atoms, ...
  std::string command;                       // external oracle launch command

  /// Expected configuration dimension (MB: 2, LEPS: 9, LJ: 3N).
  int dimension() const;
  SystemInfo system() const;
};

PotentialKind potential_kind_from_string(const std::string& name);
std::string to_string(PotentialKind kind);

/// Counting wrapper around an energy/gradient evaluator. Each search owns one
/// oracle; the counter and the evaluation log grow by exactly one entry per
/// evaluate(). An optional observer fires on every call (used for traces).
class Oracle {
 public:
  struct Record {
    Vec x;
    double energy;
    Vec gradient;
  };

  using Evaluator = std::function<EnergyGradient(const Vec&)>;
  using Observer = std::function<void(const Record&)>;

  explicit Oracle(Evaluator f) : eval_(std::move(f)) {}
  virtual ~Oracle() = default;

  EnergyGradient evaluate(const Vec& x);

  long call_count() const { return static_cast<long>(log_.size()); }
  const std::vector<Record>& log() const { return log_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }

 private:
  Evaluator eval_;
  Observer observer_;
  std::vector<Record> log_;
};

/// Builds the pure evaluator for an analytic potential spec.
Oracle::Evaluator make_potential(const PotentialSpec& spec);

/// Oracle over an analytic potential (or an external command) with a call
/// counter starting at zero.
std::unique_ptr<Oracle> counting_oracle(const PotentialSpec& spec);

/// Oracle backed by a child process speaking the line protocol
///   request : "EVAL <D> <x1> ... <xD>\n"   (decimal, 17 significant digits)
///   response: "OK <E> <g1> ... <gD>\n" or "ERR <message>\n"
/// over the child's standard streams. Protocol violations, child exit, and
/// timeouts surface as std::runtime_error with diagnostics.
std::unique_ptr<Oracle> external_oracle(const std::string& command,
                                        int timeout_ms = 30000);

}  // namespace gpsearch
