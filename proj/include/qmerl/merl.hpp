#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmerl/conditional_variance.hpp"

namespace qmerl {

/// Raised when the subtraction recursion and the equality form disagree.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One (Q_k, O_k) pair. `o` is reused on every control site whose
/// dimension matches; `o_per_site` overrides it site by site.
struct ObservablePair {
  ComplexMatrix q;
  ComplexMatrix o;
  std::map<std::size_t, ComplexMatrix> o_per_site;

  const ComplexMatrix& control_matrix(std::size_t site) const;
};

struct MerlTolerances {
  std::optional<double> split;  // absolute; default 1e-7 * max(1, L_0)
  double prune = kDefaultPruneTol;
};

struct MerlScenario {
  QuantumState state;
  std::size_t measured_site = 0;
  std::vector<std::size_t> control_order;
  std::vector<ObservablePair> pairs;
  std::optional<double> explicit_l_tra;  // empty: L_tra = Σ_k V(Q_k)
  MerlTolerances tolerances;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  Observable measured_observable(std::size_t k) const;
  ControlChain chain(std::size_t k) const;
  MerlScenario with_control_order(std::vector<std::size_t> order) const;
};

struct EntanglementClass {
  enum class Kind { Separable, Genuine };
  Kind kind = Kind::Separable;
  std::size_t parts = 0;  // L for L-separable

  std::string label(std::size_t particle_count) const;
  bool operator==(const EntanglementClass&) const = default;
};

struct SeparabilityVerdict {
  std::size_t particle_count = 0;
  std::vector<EntanglementClass> admissible;
  std::string note;

  bool genuinely_entangled() const;
  std::vector<std::string> labels() const;
};

struct MerlSpectrum {
  std::vector<double> lines;  // L_0 ... L_N
  std::vector<bool> splits;   // splits[m-1]: L_{m-1} - L_m > split_tol
  std::size_t split_count = 0;
  double split_tol = 0.0;
  std::optional<SeparabilityVerdict> verdict;  // pure states only
  double pruned_mass = 0.0;
  std::vector<std::size_t> control_order;
  std::vector<std::string> notes;
};

double traditional_bound(const MerlScenario& scenario);

/// L_0 = L_tra, L_1 = L_0 - Σ_k V[E(Q_k|O_k^{C_1})], L_m = L_{m-1} - Σ_k nested
/// term at C_m. With L_tra = Σ V(Q_k) every line is also checked against
/// Σ_k E[V(Q_k|O_k^{C_1..C_m})] to 1e-8; a mismatch throws ConsistencyError.
MerlSpectrum merl_spectrum(const MerlScenario& scenario);

/// Admissible classes for m split lines among N controls.
SeparabilityVerdict classify(std::size_t split_count, std::size_t control_count);

struct OrderSearchResult {
  std::vector<std::size_t> ordering;
  MerlSpectrum spectrum;
};

inline constexpr std::size_t kMaxOrderSearchControls = 8;

/// Control permutation with the most splits; ties go to the lexicographically
/// smallest site ordering.
OrderSearchResult best_order_search(const MerlScenario& scenario);

}  // namespace qmerl
