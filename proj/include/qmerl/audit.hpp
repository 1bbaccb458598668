#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmerl/merl.hpp"

namespace qmerl {

/// Haar-random pure state on `reg`, site 0 measured, the remaining sites as
/// controls in ascending order, and `pair_count` random Hermitian pairs
/// (each control site gets its own O_k).
MerlScenario random_scenario(const Register& reg, std::size_t pair_count, std::uint64_t seed);

struct AuditCheck {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  double worst = 0.0;  // largest violation magnitude seen
};

struct AuditReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<AuditCheck> checks;

  bool all_passed() const;
  void print(std::ostream& os) const;
};

/// Law of total variance, conditional-variance reduction, telescoping,
/// monotonicity and relation-residual checks on `trials` random scenarios
/// over mixed qubit/qutrit registers. Deterministic in `seed`.
AuditReport run_audit(std::size_t trials, std::uint64_t seed);

}  // namespace qmerl
