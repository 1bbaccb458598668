#include "qmerl/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qmerl {

namespace {

const Complex kI(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  ComplexMatrix m(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (const auto& v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

std::vector<ObservablePair> same_pairs(const std::vector<ComplexMatrix>& ops) {
  std::vector<ObservablePair> out;
  for (const auto& op : ops) out.push_back({op, op, {}});
  return out;
}

}  // namespace

ComplexMatrix sigma_x() { return from_rows({{0.0, 1.0}, {1.0, 0.0}}); }
ComplexMatrix sigma_y() { return from_rows({{0.0, -kI}, {kI, 0.0}}); }
ComplexMatrix sigma_z() { return from_rows({{1.0, 0.0}, {0.0, -1.0}}); }

ComplexMatrix spin1_x() {
  return kInvSqrt2 * from_rows({{0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}});
}
ComplexMatrix spin1_y() {
  return kInvSqrt2 * from_rows({{0.0, -kI, 0.0}, {kI, 0.0, -kI}, {0.0, kI, 0.0}});
}
ComplexMatrix spin1_z() { return from_rows({{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, -1.0}}); }

QuantumState basis_state(const Register& reg, const std::vector<std::size_t>& levels) {
  if (levels.size() != reg.site_count()) {
    throw std::invalid_argument("basis_state: " + std::to_string(levels.size()) +
                                " levels for register " + reg.to_string());
  }
  std::size_t index = 0;
  for (std::size_t s = 0; s < levels.size(); ++s) {
    if (levels[s] >= reg.dims()[s]) {
      throw std::invalid_argument("basis_state: level " + std::to_string(levels[s]) +
                                  " out of range on site " + std::to_string(s));
    }
    index = index * reg.dims()[s] + levels[s];
  }
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(reg.total_dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState::pure(reg, std::move(v));
}

QuantumState ghz(std::size_t n, std::size_t d) {
  if (n < 2) throw std::invalid_argument("ghz: need at least 2 sites");
  Register reg(std::vector<std::size_t>(n, d));
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(reg.total_dim()));
  v(0) = kInvSqrt2;
  v(v.size() - 1) = kInvSqrt2;
  return QuantumState::pure(std::move(reg), std::move(v));
}

QuantumState w_state(std::size_t n) {
  if (n < 2) throw std::invalid_argument("w_state: need at least 2 sites");
  Register reg(std::vector<std::size_t>(n, 2));
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(reg.total_dim()));
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t s = 0; s < n; ++s) v(Eigen::Index{1} << s) = amp;
  return QuantumState::pure(std::move(reg), std::move(v));
}

QuantumState separable_composite(const std::vector<QuantumState>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("separable_composite: no blocks");
  QuantumState out = blocks.front();
  for (std::size_t i = 1; i < blocks.size(); ++i) out = out.tensor(blocks[i]);
  return out;
}

OamBasisMap oam_positional_map() { return {{{2, -1, 3}, {0, -1, 1}, {0, -1, 1}}}; }
OamBasisMap oam_value_ordered_map() { return {{{3, 2, -1}, {1, 0, -1}, {1, 0, -1}}}; }

QuantumState oam_ghz(const OamGhzParams& params) {
  const double mu = params.mu;
  const double weight = 1.0 - 2.0 * mu * mu;
  if (!(mu >= 0.0) || weight < -1e-12) {
    throw std::invalid_argument("oam_ghz: mu = " + std::to_string(mu) +
                                " outside [0, 1/sqrt(2)]");
  }
  struct Term {
    std::array<int, 3> labels;
    double amplitude;
  };
  // μ = 1/√2 in floating point leaves weight ~ 1e-16
  const double first = std::abs(weight) <= 1e-12 ? 0.0 : std::sqrt(weight);
  const std::array<Term, 3> terms{{{{2, 0, 0}, first},
                                   {{-1, -1, -1}, mu},
                                   {{3, 1, 1}, -mu}}};
  Register reg({3, 3, 3});
  ComplexVector v = ComplexVector::Zero(27);
  for (const auto& term : terms) {
    Eigen::Index index = 0;
    for (std::size_t photon = 0; photon < 3; ++photon) {
      const auto& labels = params.basis_map[photon];
      const auto it = std::find(labels.begin(), labels.end(), term.labels[photon]);
      if (it == labels.end()) {
        throw std::invalid_argument("oam_ghz: basis map for photon " + std::to_string(photon + 1) +
                                    " lacks label " + std::to_string(term.labels[photon]));
      }
      index = index * 3 + (it - labels.begin());
    }
    v(index) += term.amplitude;
  }
  return QuantumState::normalized(std::move(reg), std::move(v));
}

std::vector<ObservablePair> pauli_set() {
  return same_pairs({sigma_x(), sigma_y(), sigma_z(), sigma_x() + sigma_y() + sigma_z()});
}

std::vector<ObservablePair> spin1_set() {
  return same_pairs({spin1_x(), spin1_y(), spin1_z(), spin1_x() + spin1_y() + spin1_z()});
}

std::vector<NamedScenario> fig2_scenarios() {
  const Register qubit({2});
  const QuantumState zero = basis_state(qubit, {0});
  const std::vector<std::pair<std::string, QuantumState>> states{
      {"ghz4", ghz(4)},
      {"ghz3_x_0", separable_composite({ghz(3), zero})},
      {"bell_x_0_x_0", separable_composite({ghz(2), zero, zero})},
      {"product_0000", separable_composite({zero, zero, zero, zero})},
  };
  std::vector<NamedScenario> out;
  for (const auto& [name, state] : states) {
    out.push_back({name, MerlScenario{state, 0, {1, 2, 3}, pauli_set(), std::nullopt, {}}});
  }
  return out;
}

MerlScenario fig3_scenario(double mu, const OamBasisMap& basis_map) {
  return MerlScenario{oam_ghz({mu, basis_map}), 0, {1, 2}, spin1_set(), std::nullopt, {}};
}

}  // namespace qmerl
