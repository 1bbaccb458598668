#pragma once

#include <span>
#include <vector>

#include "qmerl/state.hpp"

namespace qmerl {

/// Measured site A plus the ordered control observables O^{C_1}, ..., O^{C_N}.
class ControlChain {
 public:
  /// Rejects repeated sites, a control on the measured site, and register mismatches.
  ControlChain(std::size_t measured_site, std::vector<Observable> controls);

  std::size_t measured_site() const { return measured_site_; }
  const std::vector<Observable>& controls() const { return controls_; }
  std::size_t size() const { return controls_.size(); }

  std::span<const Observable> prefix(std::size_t m) const;

 private:
  std::size_t measured_site_;
  std::vector<Observable> controls_;
};

struct ConditioningOptions {
  double prune_tol = kDefaultPruneTol;
};

/// Bookkeeping for outcome sequences dropped below the prune tolerance.
struct EnumerationStats {
  std::size_t sequences = 0;
  std::size_t pruned_sequences = 0;
  double pruned_mass = 0.0;
};

/// V(Q | O := λ_j). Throws std::domain_error for a pruned branch.
double cond_variance_given_outcome(const Observable& q, const OutcomeBranch& branch);

/// E[V(Q|O)] = Σ_j P(O:=λ_j) V(Q | O:=λ_j).
double expected_cond_variance(const Observable& q, const Observable& o, const QuantumState& s,
                              const ConditioningOptions& opts = {});

/// E[V(Q|O^{C_1},...,O^{C_m})] over every outcome sequence of the given
/// controls, measured in order with Lüders updates.
double sequential_expected_cond_variance(const Observable& q, std::span<const Observable> controls,
                                         const QuantumState& s,
                                         const ConditioningOptions& opts = {},
                                         EnumerationStats* stats = nullptr);

/// V[E(Q|O)] = Σ_j p_j e_j^2 - (Σ_j p_j e_j)^2 with e_j = E(Q | O:=λ_j).
double variance_of_cond_expectation(const Observable& q, const Observable& o,
                                    const QuantumState& s, const ConditioningOptions& opts = {});

/// E[V(E[Q|O^{C_n}] | O^{C_1},...,O^{C_{n-1}})]: the prior-weighted average,
/// over outcome sequences of `priors`, of variance_of_cond_expectation
/// against `target` in each surviving branch.
double nested_correction_term(const Observable& q, const Observable& target,
                              std::span<const Observable> priors, const QuantumState& s,
                              const ConditioningOptions& opts = {});

/// LHS - RHS of the N-control sum relation:
///   Σ_k E[V(Q_k|O_k^{C_1..C_N})] - (l_tra - Σ_k V[E(Q_k|O_k^{C_1})]
///                                 - Σ_k Σ_{n>=2} nested_correction_term_k(n)).
/// chains[k] carries O_k on every control site. Non-negative (to rounding) for
/// any l_tra <= Σ_k V(Q_k); zero when l_tra equals that sum.
double relation_residual(std::span<const Observable> qs, std::span<const ControlChain> chains,
                         const QuantumState& s, double l_tra,
                         const ConditioningOptions& opts = {});

}  // namespace qmerl
