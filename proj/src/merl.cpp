#include "qmerl/merl.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace qmerl {

namespace {

constexpr double kCrossCheckTol = 1e-8;
constexpr double kBoundSlack = 1e-9;

}  // namespace

const ComplexMatrix& ObservablePair::control_matrix(std::size_t site) const {
  const auto it = o_per_site.find(site);
  return it == o_per_site.end() ? o : it->second;
}

void MerlScenario::validate() const {
  const Register& reg = state.reg();
  if (pairs.empty()) throw std::invalid_argument("scenario: at least one observable pair required");
  if (measured_site >= reg.site_count()) {
    throw std::invalid_argument("scenario: measured site " + std::to_string(measured_site) +
                                " out of range for register " + reg.to_string());
  }
  if (control_order.empty()) throw std::invalid_argument("scenario: no control sites");
  std::set<std::size_t> seen{measured_site};
  for (std::size_t site : control_order) {
    if (site >= reg.site_count()) {
      throw std::invalid_argument("scenario: control site " + std::to_string(site) +
                                  " out of range for register " + reg.to_string());
    }
    if (!seen.insert(site).second) {
      throw std::invalid_argument("scenario: control site " + std::to_string(site) +
                                  " repeats or equals the measured site");
    }
  }
  if (tolerances.split && !(*tolerances.split > 0.0)) {
    throw std::invalid_argument("scenario: split tolerance must be positive");
  }
  if (!(tolerances.prune >= 0.0)) {
    throw std::invalid_argument("scenario: prune tolerance must be non-negative");
  }
  // Building the observables checks shapes and Hermiticity.
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    (void)measured_observable(k);
    (void)chain(k);
  }
}

Observable MerlScenario::measured_observable(std::size_t k) const {
  try {
    return Observable(state.reg(), measured_site, pairs.at(k).q);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("pair " + std::to_string(k) + " q: " + e.what());
  }
}

ControlChain MerlScenario::chain(std::size_t k) const {
  const ObservablePair& pair = pairs.at(k);
  std::vector<Observable> controls;
  controls.reserve(control_order.size());
  for (std::size_t site : control_order) {
    try {
      controls.emplace_back(state.reg(), site, pair.control_matrix(site));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("pair " + std::to_string(k) + " o on site " +
                                  std::to_string(site) + ": " + e.what());
    }
  }
  return ControlChain(measured_site, std::move(controls));
}

MerlScenario MerlScenario::with_control_order(std::vector<std::size_t> order) const {
  MerlScenario out = *this;
  out.control_order = std::move(order);
  return out;
}

std::string EntanglementClass::label(std::size_t particle_count) const {
  if (kind == Kind::Genuine) return "genuinely entangled";
  std::string s = std::to_string(parts) + "-separable";
  if (parts == particle_count) s += " (fully separable)";
  return s;
}

bool SeparabilityVerdict::genuinely_entangled() const {
  return std::any_of(admissible.begin(), admissible.end(), [](const EntanglementClass& c) {
    return c.kind == EntanglementClass::Kind::Genuine;
  });
}

std::vector<std::string> SeparabilityVerdict::labels() const {
  std::vector<std::string> out;
  for (const auto& c : admissible) out.push_back(c.label(particle_count));
  return out;
}

double traditional_bound(const MerlScenario& scenario) {
  if (scenario.explicit_l_tra) return *scenario.explicit_l_tra;
  double total = 0.0;
  for (std::size_t k = 0; k < scenario.pairs.size(); ++k) {
    total += variance(scenario.measured_observable(k), scenario.state);
  }
  return total;
}

SeparabilityVerdict classify(std::size_t split_count, std::size_t control_count) {
  if (split_count > control_count) {
    throw std::invalid_argument("classify: split count " + std::to_string(split_count) +
                                " exceeds control count " + std::to_string(control_count));
  }
  SeparabilityVerdict v;
  v.particle_count = control_count + 1;
  using Kind = EntanglementClass::Kind;
  if (split_count == control_count) {
    v.admissible.push_back({Kind::Genuine, 0});
    v.note = "all lines split: genuinely multiparticle entangled";
    return v;
  }
  // (N+2-m)-separable down to 2-separable; for m = 0 that starts at M = N+1.
  const std::size_t top =
      split_count == 0 ? v.particle_count : control_count + 2 - split_count;
  for (std::size_t parts = top; parts >= 2; --parts) v.admissible.push_back({Kind::Separable, parts});
  if (split_count == 0) v.note = "no entanglement with the measured system detected";
  return v;
}

MerlSpectrum merl_spectrum(const MerlScenario& scenario) {
  scenario.validate();
  const ConditioningOptions opts{scenario.tolerances.prune};
  const std::size_t n_controls = scenario.control_order.size();
  const std::size_t n_pairs = scenario.pairs.size();

  std::vector<Observable> qs;
  std::vector<ControlChain> chains;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    qs.push_back(scenario.measured_observable(k));
    chains.push_back(scenario.chain(k));
  }

  MerlSpectrum out;
  out.control_order = scenario.control_order;

  double variance_sum = 0.0;
  for (const auto& q : qs) variance_sum += variance(q, scenario.state);
  const double l0 = traditional_bound(scenario);
  if (scenario.explicit_l_tra && l0 > variance_sum + kBoundSlack) {
    out.notes.push_back("explicit L_tra " + std::to_string(l0) +
                        " exceeds the sum of variances " + std::to_string(variance_sum));
  }

  out.lines.reserve(n_controls + 1);
  out.lines.push_back(l0);
  for (std::size_t m = 1; m <= n_controls; ++m) {
    double drop = 0.0;
    for (std::size_t k = 0; k < n_pairs; ++k) {
      const auto& controls = chains[k].controls();
      drop += m == 1 ? variance_of_cond_expectation(qs[k], controls[0], scenario.state, opts)
                     : nested_correction_term(qs[k], controls[m - 1], chains[k].prefix(m - 1),
                                              scenario.state, opts);
    }
    out.lines.push_back(out.lines.back() - drop);
  }

  for (std::size_t k = 0; k < n_pairs; ++k) {
    EnumerationStats stats;
    (void)sequential_expected_cond_variance(qs[k], chains[k].controls(), scenario.state, opts,
                                            &stats);
    out.pruned_mass = std::max(out.pruned_mass, stats.pruned_mass);
  }

  if (!scenario.explicit_l_tra) {
    for (std::size_t m = 1; m <= n_controls; ++m) {
      double direct = 0.0;
      for (std::size_t k = 0; k < n_pairs; ++k) {
        direct += sequential_expected_cond_variance(qs[k], chains[k].prefix(m), scenario.state,
                                                    opts);
      }
      if (std::abs(direct - out.lines[m]) > kCrossCheckTol) {
        throw ConsistencyError("MERL " + std::to_string(m) + ": recursion gives " +
                               std::to_string(out.lines[m]) + " but direct conditioning gives " +
                               std::to_string(direct));
      }
    }
  }

  out.split_tol = scenario.tolerances.split.value_or(1e-7 * std::max(1.0, l0));
  out.splits.reserve(n_controls);
  for (std::size_t m = 1; m <= n_controls; ++m) {
    const bool split = out.lines[m - 1] - out.lines[m] > out.split_tol;
    out.splits.push_back(split);
    if (split) ++out.split_count;
  }

  if (scenario.state.is_pure()) {
    out.verdict = classify(out.split_count, n_controls);
  } else {
    out.notes.push_back("classification not supported for mixed states");
  }
  return out;
}

OrderSearchResult best_order_search(const MerlScenario& scenario) {
  if (scenario.control_order.size() > kMaxOrderSearchControls) {
    throw std::invalid_argument(
        "best_order_search: " + std::to_string(scenario.control_order.size()) +
        " controls exceed the exhaustive limit of " + std::to_string(kMaxOrderSearchControls) +
        "; analyze a chosen order instead");
  }
  std::vector<std::size_t> order = scenario.control_order;
  std::sort(order.begin(), order.end());
  std::optional<OrderSearchResult> best;
  do {
    MerlSpectrum spectrum = merl_spectrum(scenario.with_control_order(order));
    if (!best || spectrum.split_count > best->spectrum.split_count) {
      best = OrderSearchResult{order, std::move(spectrum)};
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return std::move(*best);
}

}  // namespace qmerl
