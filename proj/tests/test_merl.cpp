#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "qmerl/audit.hpp"
#include "qmerl/merl.hpp"
#include "qmerl/scenarios.hpp"

using namespace qmerl;
using Catch::Matchers::WithinAbs;

namespace {

MerlScenario pauli_scenario(QuantumState state, std::vector<std::size_t> order) {
  return MerlScenario{std::move(state), 0, std::move(order), pauli_set(), std::nullopt, {}};
}

const QuantumState& zero() {
  static const QuantumState z = basis_state(Register({2}), {0});
  return z;
}

// Lines by the equality form, brute force on full-space density matrices.
std::vector<double> oracle_lines(const MerlScenario& sc) {
  const auto dims = sc.state.reg().dims();
  const oracle::Mat rho = sc.state.density_matrix();
  std::vector<double> out;
  for (std::size_t m = 0; m <= sc.control_order.size(); ++m) {
    double total = 0.0;
    for (const auto& pair : sc.pairs) {
      std::vector<oracle::Control> ctrls;
      for (std::size_t i = 0; i < m; ++i) ctrls.push_back({sc.control_order[i], pair.control_matrix(sc.control_order[i])});
      total += oracle::seq_variance(rho, oracle::full(pair.q, sc.measured_site, dims), ctrls, 0, dims);
    }
    out.push_back(total);
  }
  return out;
}

void check_lines(const MerlSpectrum& s, const std::vector<double>& expected, double tol) {
  REQUIRE(s.lines.size() == expected.size());
  for (std::size_t m = 0; m < expected.size(); ++m) {
    INFO("line " << m);
    CHECK_THAT(s.lines[m], WithinAbs(expected[m], tol));
  }
}

}  // namespace

TEST_CASE("traditional bound", "[merl]") {
  CHECK_THAT(traditional_bound(pauli_scenario(ghz(4), {1, 2, 3})), WithinAbs(6.0, 1e-12));
  CHECK_THAT(traditional_bound(pauli_scenario(separable_composite({zero(), zero(), zero(), zero()}), {1, 2, 3})),
             WithinAbs(4.0, 1e-12));
  MerlScenario sc = pauli_scenario(ghz(4), {1, 2, 3});
  sc.explicit_l_tra = 0.0;
  CHECK(traditional_bound(sc) == 0.0);
}

TEST_CASE("explicit L_tra above the variance sum is flagged", "[merl]") {
  MerlScenario sc = pauli_scenario(ghz(3), {1, 2});
  sc.explicit_l_tra = 10.0;
  const MerlSpectrum s = merl_spectrum(sc);
  CHECK(s.lines[0] == 10.0);
  REQUIRE_FALSE(s.notes.empty());
  CHECK(s.notes.front().find("exceeds") != std::string::npos);
  // the drops do not depend on L_tra
  const MerlSpectrum ref = merl_spectrum(pauli_scenario(ghz(3), {1, 2}));
  CHECK_THAT(s.lines[1] - s.lines[2], WithinAbs(ref.lines[1] - ref.lines[2], 1e-12));
}

TEST_CASE("four-qubit spectra", "[merl]") {
  const auto ghz_lines = merl_spectrum(pauli_scenario(ghz(4), {1, 2, 3}));
  check_lines(ghz_lines, {6.0, 14.0 / 3.0, 4.5, 4.0 / 3.0}, 1e-9);
  CHECK(ghz_lines.split_count == 3);
  CHECK(ghz_lines.verdict->genuinely_entangled());

  const auto ghz3 = merl_spectrum(pauli_scenario(separable_composite({ghz(3), zero()}), {1, 2, 3}));
  check_lines(ghz3, {6.0, 14.0 / 3.0, 3.0, 3.0}, 1e-9);
  CHECK(ghz3.split_count == 2);

  const auto bell = merl_spectrum(pauli_scenario(separable_composite({ghz(2), zero(), zero()}), {1, 2, 3}));
  check_lines(bell, {6.0, 8.0 / 3.0, 8.0 / 3.0, 8.0 / 3.0}, 1e-9);
  CHECK(bell.split_count == 1);
  CHECK(bell.splits == std::vector<bool>{true, false, false});

  const auto product = merl_spectrum(pauli_scenario(separable_composite({zero(), zero(), zero(), zero()}), {1, 2, 3}));
  check_lines(product, {4.0, 4.0, 4.0, 4.0}, 1e-9);
  CHECK(product.split_count == 0);
  CHECK(product.pruned_mass == 0.0);
}

TEST_CASE("recursion matches the full-space oracle", "[merl][property]") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    std::vector<std::size_t> dims{2, 2, 3, 2};
    if (seed % 2) dims = {3, 2, 2, 2};
    const MerlScenario sc = random_scenario(Register(dims), 1 + seed % 3, seed);
    check_lines(merl_spectrum(sc), oracle_lines(sc), 1e-9);
  }
}

TEST_CASE("W state splits under the Pauli set", "[merl]") {
  const auto s = merl_spectrum(pauli_scenario(w_state(3), {1, 2}));
  check_lines(s, {52.0 / 9.0, 514.0 / 117.0, 148.0 / 55.0}, 1e-9);
  CHECK(s.split_count == 2);
}

TEST_CASE("singlet control collapses every Pauli-set variance", "[merl]") {
  ComplexVector v(4);
  v << 0.0, 1.0, -1.0, 0.0;
  const auto s = merl_spectrum(pauli_scenario(QuantumState::normalized(Register({2, 2}), v), {1}));
  CHECK_THAT(s.lines[0], WithinAbs(6.0, 1e-12));
  CHECK(s.lines[1] <= 1e-8);
  CHECK(s.verdict->genuinely_entangled());
}

TEST_CASE("product states give flat lines", "[merl][property]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const QuantumState a = haar_random_pure(Register({seed % 2 ? 3u : 2u}), seed);
    const QuantumState rest = haar_random_pure(Register({2, 3, 2}), seed + 500);
    MerlScenario sc = random_scenario(a.tensor(rest).reg(), 3, seed);
    sc.state = a.tensor(rest);
    const auto s = merl_spectrum(sc);
    for (double l : s.lines) CHECK_THAT(l, WithinAbs(s.lines[0], 1e-9));
    CHECK(s.split_count == 0);
  }
}

TEST_CASE("lines are nonincreasing on random scenarios", "[merl][property]") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::vector<std::size_t> dims{2 + seed % 2, 2, 2 + (seed / 2) % 2, 2};
    const auto s = merl_spectrum(random_scenario(Register(dims), 2, seed));
    for (std::size_t m = 1; m < s.lines.size(); ++m) CHECK(s.lines[m - 1] - s.lines[m] >= -1e-9);
  }
}

TEST_CASE("mixed states get spectra but no verdict", "[merl]") {
  const Register reg({2, 2, 2});
  const ComplexMatrix rho = 0.5 * ghz(3).density_matrix() + 0.5 * identity(8) / 8.0;
  MerlScenario sc = pauli_scenario(QuantumState::mixed(reg, rho), {1, 2});
  const auto s = merl_spectrum(sc);
  CHECK_FALSE(s.verdict.has_value());
  REQUIRE_FALSE(s.notes.empty());
  CHECK(s.notes.back() == "classification not supported for mixed states");
  check_lines(s, oracle_lines(sc), 1e-9);
}

TEST_CASE("classify", "[merl]") {
  const auto genuine = classify(3, 3);
  CHECK(genuine.particle_count == 4);
  CHECK(genuine.labels() == std::vector<std::string>{"genuinely entangled"});
  CHECK(genuine.genuinely_entangled());

  const auto none = classify(0, 3);
  CHECK(none.labels() ==
        std::vector<std::string>{"4-separable (fully separable)", "3-separable", "2-separable"});
  CHECK(none.note == "no entanglement with the measured system detected");
  CHECK_FALSE(none.genuinely_entangled());

  CHECK(classify(2, 3).labels() == std::vector<std::string>{"3-separable", "2-separable"});
  CHECK(classify(1, 3).labels() ==
        std::vector<std::string>{"4-separable (fully separable)", "3-separable", "2-separable"});
  CHECK_THROWS_AS(classify(4, 3), std::invalid_argument);

  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t m = 0; m <= n; ++m) {
      const auto v = classify(m, n);
      CHECK_FALSE(v.admissible.empty());
      CHECK(v.genuinely_entangled() == (m == n));
    }
  }
}

TEST_CASE("split tolerance defaults relative to L0 and can be overridden", "[merl]") {
  MerlScenario sc = pauli_scenario(ghz(4), {1, 2, 3});
  CHECK_THAT(merl_spectrum(sc).split_tol, WithinAbs(6e-7, 1e-18));
  // drops are 4/3, 1/6, 19/6
  sc.tolerances.split = 4.0;
  const auto s = merl_spectrum(sc);
  CHECK(s.split_tol == 4.0);
  CHECK(s.split_count == 0);
  sc.tolerances.split = 2.0;
  CHECK(merl_spectrum(sc).splits == std::vector<bool>{false, false, true});
  sc.tolerances.split = 1.0;
  CHECK(merl_spectrum(sc).split_count == 2);
}

TEST_CASE("scenario validation", "[merl]") {
  MerlScenario sc = pauli_scenario(ghz(3), {1, 2});
  sc.control_order = {1, 1};
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
  sc.control_order = {0, 1};
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
  sc.control_order = {1, 5};
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
  sc.control_order = {};
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
  sc.control_order = {1, 2};
  sc.pairs.clear();
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
  sc.pairs = spin1_set();
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
  sc.pairs = pauli_set();
  sc.tolerances.split = 0.0;
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
}

TEST_CASE("per-site control operators for mixed dimensions", "[merl]") {
  const QuantumState s = haar_random_pure(Register({2, 3, 2}), 8);
  ObservablePair pair{sigma_x(), sigma_z(), {{1, spin1_x()}}};
  MerlScenario sc{s, 0, {1, 2}, {pair}, std::nullopt, {}};
  check_lines(merl_spectrum(sc), oracle_lines(sc), 1e-10);
  sc.pairs[0].o_per_site.clear();
  CHECK_THROWS_AS(merl_spectrum(sc), std::invalid_argument);
}

TEST_CASE("best_order_search", "[merl]") {
  const QuantumState s = separable_composite({ghz(3), zero()});
  for (std::vector<std::size_t> order : {std::vector<std::size_t>{3, 1, 2}, {1, 2, 3}, {2, 3, 1}}) {
    const auto r = best_order_search(pauli_scenario(s, order));
    CHECK(r.spectrum.split_count == 2);
    CHECK(r.ordering == std::vector<std::size_t>{1, 2, 3});
    CHECK(r.spectrum.control_order == r.ordering);
  }
  std::vector<std::size_t> perm{1, 2, 3};
  do {
    CHECK(merl_spectrum(pauli_scenario(ghz(4), perm)).split_count == 3);
    CHECK(merl_spectrum(pauli_scenario(separable_composite({zero(), zero(), zero(), zero()}), perm)).split_count == 0);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // ties resolve to the lexicographically smallest ordering
  const auto product = best_order_search(pauli_scenario(separable_composite({zero(), zero(), zero(), zero()}), {3, 2, 1}));
  CHECK(product.spectrum.split_count == 0);
  CHECK(product.ordering == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("best_order_search refuses oversized control sets", "[merl]") {
  const Register reg(std::vector<std::size_t>(10, 2));
  MerlScenario sc = pauli_scenario(basis_state(reg, std::vector<std::size_t>(10, 0)), {1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK_THROWS_AS(best_order_search(sc), std::invalid_argument);
}

TEST_CASE("order search: a product particle first delays the splits", "[merl]") {
  // brute force over all six orderings, pinned from the oracle
  const QuantumState s = separable_composite({ghz(3), zero()});
  const auto first = merl_spectrum(pauli_scenario(s, {3, 1, 2}));
  check_lines(first, {6.0, 6.0, 14.0 / 3.0, 3.0}, 1e-9);
  CHECK(first.splits == std::vector<bool>{false, true, true});
}
