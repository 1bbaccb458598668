#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qmerl/linalg.hpp"

namespace qmerl {

inline constexpr double kDefaultPruneTol = 1e-12;

/// Pure amplitude vector or density matrix over a Register.
class QuantumState {
 public:
  /// Validates normalization to 1e-10.
  static QuantumState pure(Register reg, ComplexVector amplitudes);
  /// Validates Hermiticity, unit trace and positivity (smallest eigenvalue >= -1e-9).
  static QuantumState mixed(Register reg, ComplexMatrix rho);
  /// Rescales to unit norm; rejects the zero vector.
  static QuantumState normalized(Register reg, ComplexVector amplitudes);

  const Register& reg() const { return reg_; }
  bool is_pure() const { return std::holds_alternative<ComplexVector>(data_); }

  const ComplexVector& amplitudes() const;
  const ComplexMatrix& density() const;
  /// |ψ><ψ| for pure states, the stored matrix otherwise.
  ComplexMatrix density_matrix() const;

  ComplexMatrix reduced(std::span<const std::size_t> keep) const;
  ComplexMatrix reduced_site(std::size_t site) const;

  /// Tensor product, this state first.
  QuantumState tensor(const QuantumState& other) const;

 private:
  QuantumState(Register reg, ComplexVector v) : reg_(std::move(reg)), data_(std::move(v)) {}
  QuantumState(Register reg, ComplexMatrix m) : reg_(std::move(reg)), data_(std::move(m)) {}

  friend struct StateAccess;

  Register reg_;
  std::variant<ComplexVector, ComplexMatrix> data_;
};

/// Hermitian operator acting on one site, with its grouped spectrum.
class Observable {
 public:
  Observable(Register reg, std::size_t site, ComplexMatrix local,
             double group_tol = kDefaultGroupTol);

  const Register& reg() const { return reg_; }
  std::size_t site() const { return site_; }
  const ComplexMatrix& matrix() const { return local_; }
  const std::vector<SpectralEntry>& spectrum() const { return spectrum_; }

 private:
  Register reg_;
  std::size_t site_;
  ComplexMatrix local_;
  std::vector<SpectralEntry> spectrum_;
};

struct OutcomeBranch {
  double eigenvalue = 0.0;
  double probability = 0.0;
  std::optional<QuantumState> post_state;  // empty when pruned

  bool pruned() const { return !post_state.has_value(); }
};

double expectation(const Observable& q, const QuantumState& s);
double variance(const Observable& q, const QuantumState& s);

/// One branch per spectral entry, post-states by the Lüders rule.
std::vector<OutcomeBranch> measure_branches(const Observable& o, const QuantumState& s,
                                            double prune_tol = kDefaultPruneTol);

struct RobertsonTerms {
  double lhs;  // V(R) V(S)
  double rhs;  // |<[R,S]>|^2 / 4
};

RobertsonTerms robertson_check(const Observable& r, const Observable& s, const QuantumState& st);

QuantumState haar_random_pure(const Register& reg, std::uint64_t seed);

/// (G + G^†)/2 with complex Gaussian G; test and audit fuel.
ComplexMatrix random_hermitian(std::size_t dim, std::uint64_t seed);

}  // namespace qmerl
