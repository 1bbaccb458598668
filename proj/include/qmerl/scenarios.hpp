#pragma once

#include <array>
#include <string>
#include <vector>

#include "qmerl/merl.hpp"

namespace qmerl {

ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();

// Spin-1 with ħ = 1 in the basis order m = +1, 0, -1.
ComplexMatrix spin1_x();
ComplexMatrix spin1_y();
ComplexMatrix spin1_z();

/// Computational basis product state |levels[0] levels[1] ...>.
QuantumState basis_state(const Register& reg, const std::vector<std::size_t>& levels);

/// (|0...0> + |d-1,...,d-1>)/√2 on n sites of dimension d.
QuantumState ghz(std::size_t n, std::size_t d = 2);

/// Equal superposition of the n single-excitation qubit basis states.
QuantumState w_state(std::size_t n);

/// Tensor product of the blocks in listed order.
QuantumState separable_composite(const std::vector<QuantumState>& blocks);

/// OAM label listed at each local basis index, per photon.
using OamBasisMap = std::array<std::array<int, 3>, 3>;

/// Labels in the listed order: |2>,|-1>,|3> for photon 1 and |0>,|-1>,|1> for photons 2 and 3.
OamBasisMap oam_positional_map();
/// Labels sorted by OAM value, largest at m = +1.
OamBasisMap oam_value_ordered_map();

struct OamGhzParams {
  double mu = 0.0;
  OamBasisMap basis_map = oam_positional_map();
};

/// √(1-2μ²)|2,0,0> + μ|-1,-1,-1> - μ|3,1,1> on three qutrits, labels
/// resolved through params.basis_map. Rejects μ outside [0, 1/√2].
QuantumState oam_ghz(const OamGhzParams& params);

/// σ_x, σ_y, σ_z, σ_x+σ_y+σ_z with Q_k = O_k.
std::vector<ObservablePair> pauli_set();
/// J_x, J_y, J_z, J_x+J_y+J_z with Q_k = O_k.
std::vector<ObservablePair> spin1_set();

struct NamedScenario {
  std::string name;
  MerlScenario scenario;
};

/// The four-qubit states GHZ, GHZ3⊗|0>, Bell⊗|0>⊗|0>, |0000> with site 0
/// measured, controls (1,2,3), Pauli set, L_tra = Σ V(Q_k).
std::vector<NamedScenario> fig2_scenarios();

/// oam_ghz(μ) with the spin-1 set, photon 1 measured, photons 2 and 3 as controls.
MerlScenario fig3_scenario(double mu, const OamBasisMap& basis_map = oam_positional_map());

}  // namespace qmerl
