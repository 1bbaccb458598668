#include "qmerl/audit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "qmerl/scenario_io.hpp"

namespace qmerl {

namespace {

constexpr double kVarianceTol = 1e-9;
constexpr double kTelescopeTol = 1e-8;
constexpr double kResidualTol = 1e-8;

void record(AuditCheck& check, double violation) {
  // violation <= 0 means the check holds
  if (violation > 0.0) {
    ++check.failed;
  } else {
    ++check.passed;
  }
  check.worst = std::max(check.worst, violation);
}

}  // namespace

MerlScenario random_scenario(const Register& reg, std::size_t pair_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  QuantumState state = haar_random_pure(reg, rng());
  std::vector<std::size_t> order;
  for (std::size_t s = 1; s < reg.site_count(); ++s) order.push_back(s);
  std::vector<ObservablePair> pairs;
  for (std::size_t k = 0; k < pair_count; ++k) {
    ObservablePair pair;
    pair.q = random_hermitian(reg.dim(0), rng());
    pair.o = pair.q;
    for (std::size_t s : order) pair.o_per_site[s] = random_hermitian(reg.dim(s), rng());
    pairs.push_back(std::move(pair));
  }
  return MerlScenario{std::move(state), 0, std::move(order), std::move(pairs), std::nullopt, {}};
}

bool AuditReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.failed == 0; });
}

void AuditReport::print(std::ostream& os) const {
  os << "audit: " << trials << " trials, seed " << seed << '\n';
  for (const auto& c : checks) {
    os << "  " << (c.failed == 0 ? "PASS" : "FAIL") << "  " << c.name << ": " << c.passed
       << " passed, " << c.failed << " failed, worst violation " << format_real(c.worst) << '\n';
  }
}

AuditReport run_audit(std::size_t trials, std::uint64_t seed) {
  AuditReport report;
  report.trials = trials;
  report.seed = seed;
  AuditCheck total_variance{"law of total variance", 0, 0, 0.0};
  AuditCheck reduction{"conditional variance <= variance", 0, 0, 0.0};
  AuditCheck telescoping{"telescoping identity", 0, 0, 0.0};
  AuditCheck monotone{"monotone in chain length", 0, 0, 0.0};
  AuditCheck equality{"relation residual = 0 at L_tra = sum V", 0, 0, 0.0};
  AuditCheck residual{"relation residual >= 0 for L_tra <= sum V", 0, 0, 0.0};
  AuditCheck lines{"MERL lines nonincreasing", 0, 0, 0.0};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_pick(2, 3);
  std::uniform_int_distribution<std::size_t> site_pick(3, 4);
  std::uniform_int_distribution<std::size_t> pair_pick(1, 4);
  std::uniform_real_distribution<double> fraction(0.0, 1.0);

  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<std::size_t> dims(site_pick(rng));
    for (auto& d : dims) d = static_cast<std::size_t>(dim_pick(rng));
    const MerlScenario sc = random_scenario(Register(dims), pair_pick(rng), rng());

    std::vector<Observable> qs;
    std::vector<ControlChain> chains;
    double variance_sum = 0.0;
    for (std::size_t k = 0; k < sc.pairs.size(); ++k) {
      qs.push_back(sc.measured_observable(k));
      chains.push_back(sc.chain(k));
      variance_sum += variance(qs.back(), sc.state);
    }

    for (std::size_t k = 0; k < qs.size(); ++k) {
      const Observable& q = qs[k];
      const Observable& first = chains[k].controls().front();
      const double v = variance(q, sc.state);
      const double ecv = expected_cond_variance(q, first, sc.state);
      const double vce = variance_of_cond_expectation(q, first, sc.state);
      record(total_variance, std::abs(v - ecv - vce) - kVarianceTol);
      record(reduction, ecv - v - kVarianceTol);

      double previous = ecv;
      for (std::size_t m = 2; m <= chains[k].size(); ++m) {
        const double current = sequential_expected_cond_variance(q, chains[k].prefix(m), sc.state);
        const double nested =
            nested_correction_term(q, chains[k].controls()[m - 1], chains[k].prefix(m - 1), sc.state);
        record(telescoping, std::abs(previous - current - nested) - kTelescopeTol);
        record(monotone, current - previous - kVarianceTol);
        previous = current;
      }
    }

    const double r0 = relation_residual(qs, chains, sc.state, variance_sum);
    record(equality, std::abs(r0) - kResidualTol);
    const double r1 = relation_residual(qs, chains, sc.state, fraction(rng) * variance_sum);
    record(residual, -r1 - kResidualTol);

    const MerlSpectrum spectrum = merl_spectrum(sc);
    for (std::size_t m = 1; m < spectrum.lines.size(); ++m) {
      record(lines, spectrum.lines[m] - spectrum.lines[m - 1] - kVarianceTol);
    }
  }
  report.checks = {total_variance, reduction, telescoping, monotone, equality, residual, lines};
  return report;
}

}  // namespace qmerl
