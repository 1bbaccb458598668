#include "qmerl/conditional_variance.hpp"

#include <functional>
#include <set>
#include <stdexcept>
#include <string>

namespace qmerl {

ControlChain::ControlChain(std::size_t measured_site, std::vector<Observable> controls)
    : measured_site_(measured_site), controls_(std::move(controls)) {
  std::set<std::size_t> seen{measured_site_};
  for (const auto& o : controls_) {
    if (!(o.reg() == controls_.front().reg())) {
      throw std::invalid_argument("ControlChain: control observables live on different registers");
    }
    if (!seen.insert(o.site()).second) {
      throw std::invalid_argument("ControlChain: site " + std::to_string(o.site()) +
                                  (o.site() == measured_site_ ? " is the measured site"
                                                              : " appears twice"));
    }
  }
  if (!controls_.empty() && measured_site_ >= controls_.front().reg().site_count()) {
    throw std::out_of_range("ControlChain: measured site " + std::to_string(measured_site_) +
                            " out of range");
  }
}

std::span<const Observable> ControlChain::prefix(std::size_t m) const {
  if (m > controls_.size()) {
    throw std::out_of_range("ControlChain: prefix " + std::to_string(m) + " longer than chain of " +
                            std::to_string(controls_.size()));
  }
  return std::span<const Observable>(controls_).first(m);
}

namespace {

void require_distinct(const Observable& q, const Observable& o, const char* op) {
  if (q.site() == o.site()) {
    throw std::invalid_argument(std::string(op) + ": measured and control observables share site " +
                                std::to_string(q.site()));
  }
}

void require_distinct(const Observable& q, std::span<const Observable> controls, const char* op) {
  std::set<std::size_t> seen{q.site()};
  for (const auto& o : controls) {
    if (!seen.insert(o.site()).second) {
      throw std::invalid_argument(std::string(op) + ": site " + std::to_string(o.site()) +
                                  " used more than once");
    }
  }
}

// Depth-first walk over outcome sequences of `controls`; `leaf` receives each
// surviving sequence's probability and post-state. Children are visited in
// spectral order so summation order is fixed.
void for_each_sequence(std::span<const Observable> controls, const QuantumState& s, double weight,
                       const ConditioningOptions& opts, EnumerationStats* stats,
                       const std::function<void(double, const QuantumState&)>& leaf) {
  if (controls.empty()) {
    if (stats) ++stats->sequences;
    leaf(weight, s);
    return;
  }
  for (const auto& branch : measure_branches(controls.front(), s, opts.prune_tol)) {
    const double w = weight * branch.probability;
    if (branch.pruned()) {
      if (stats) {
        ++stats->pruned_sequences;
        stats->pruned_mass += w;
      }
      continue;
    }
    for_each_sequence(controls.subspan(1), *branch.post_state, w, opts, stats, leaf);
  }
}

}  // namespace

double cond_variance_given_outcome(const Observable& q, const OutcomeBranch& branch) {
  if (branch.pruned()) {
    throw std::domain_error("cond_variance_given_outcome: zero-probability condition (p = " +
                            std::to_string(branch.probability) + ")");
  }
  return variance(q, *branch.post_state);
}

double expected_cond_variance(const Observable& q, const Observable& o, const QuantumState& s,
                              const ConditioningOptions& opts) {
  require_distinct(q, o, "expected_cond_variance");
  double total = 0.0;
  for (const auto& branch : measure_branches(o, s, opts.prune_tol)) {
    if (!branch.pruned()) total += branch.probability * variance(q, *branch.post_state);
  }
  return total;
}

double sequential_expected_cond_variance(const Observable& q, std::span<const Observable> controls,
                                         const QuantumState& s, const ConditioningOptions& opts,
                                         EnumerationStats* stats) {
  require_distinct(q, controls, "sequential_expected_cond_variance");
  double total = 0.0;
  for_each_sequence(controls, s, 1.0, opts, stats,
                    [&](double p, const QuantumState& post) { total += p * variance(q, post); });
  return total;
}

double variance_of_cond_expectation(const Observable& q, const Observable& o,
                                    const QuantumState& s, const ConditioningOptions& opts) {
  require_distinct(q, o, "variance_of_cond_expectation");
  double first = 0.0;
  double second = 0.0;
  for (const auto& branch : measure_branches(o, s, opts.prune_tol)) {
    if (branch.pruned()) continue;
    const double e = expectation(q, *branch.post_state);
    first += branch.probability * e;
    second += branch.probability * e * e;
  }
  const double v = second - first * first;
  return (v < 0.0 && v >= -1e-12) ? 0.0 : v;
}

double nested_correction_term(const Observable& q, const Observable& target,
                              std::span<const Observable> priors, const QuantumState& s,
                              const ConditioningOptions& opts) {
  std::vector<Observable> all(priors.begin(), priors.end());
  all.push_back(target);
  require_distinct(q, all, "nested_correction_term");
  double total = 0.0;
  for_each_sequence(priors, s, 1.0, opts, nullptr, [&](double p, const QuantumState& post) {
    total += p * variance_of_cond_expectation(q, target, post, opts);
  });
  return total;
}

double relation_residual(std::span<const Observable> qs, std::span<const ControlChain> chains,
                         const QuantumState& s, double l_tra, const ConditioningOptions& opts) {
  if (qs.empty()) throw std::invalid_argument("relation_residual: need at least one observable");
  if (qs.size() != chains.size()) {
    throw std::invalid_argument("relation_residual: " + std::to_string(qs.size()) +
                                " observables but " + std::to_string(chains.size()) + " chains");
  }
  double lhs = 0.0;
  double rhs = l_tra;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const ControlChain& chain = chains[k];
    if (qs[k].site() != chain.measured_site()) {
      throw std::invalid_argument("relation_residual: Q_" + std::to_string(k) +
                                  " is not on the chain's measured site");
    }
    lhs += sequential_expected_cond_variance(qs[k], chain.controls(), s, opts);
    if (chain.size() == 0) continue;
    rhs -= variance_of_cond_expectation(qs[k], chain.controls().front(), s, opts);
    for (std::size_t n = 1; n < chain.size(); ++n) {
      rhs -= nested_correction_term(qs[k], chain.controls()[n], chain.prefix(n), s, opts);
    }
  }
  return lhs - rhs;
}

}  // namespace qmerl
