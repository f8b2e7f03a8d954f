#include "holesynth/counterexample.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "holesynth/errors.hpp"

namespace holesynth {

Rerouting reroute(const Mc& mc, std::span<const char> expanded, std::span<const double> gamma,
                  const StateSet& target) {
  const std::size_t n = mc.num_states();
  if (expanded.size() != n || gamma.size() != n) {
    throw InvalidArgument("rerouting masks must cover every state");
  }
  const auto top = static_cast<StateIndex>(n);
  const auto bottom = static_cast<StateIndex>(n + 1);
  std::vector<Distribution> rows;
  rows.reserve(n + 2);
  for (StateIndex s = 0; s < n; ++s) {
    if (expanded[s]) {
      rows.push_back(mc.row(s));
      continue;
    }
    const double g = gamma[s];
    if (!(g >= 0.0 && g <= 1.0)) {
      throw InvalidArgument("rerouting value of state " + std::to_string(s) +
                            " is outside [0,1]");
    }
    rows.emplace_back(std::vector<Entry>{Entry{top, g}, Entry{bottom, 1.0 - g}});
  }
  rows.push_back(Distribution::point(top));
  rows.push_back(Distribution::point(bottom));

  StateSet extended = target;
  extended.push_back(top);
  return Rerouting{Mc(mc.initial(), std::move(rows)), top, bottom,
                   make_state_set(std::move(extended))};
}

namespace {

bool supported(const Family& family, StateIndex s, std::span<const char> relevant) {
  for (ParamIndex k : family.support(s)) {
    if (!relevant[k] && family.is_multi_valued(k)) {
      return false;
    }
  }
  return true;
}

}  // namespace

Exploration reachable_via_holes(const Mc& mc, const Family& family,
                                std::span<const char> relevant) {
  const std::size_t n = mc.num_states();
  if (n != family.num_states() || relevant.size() != family.num_params()) {
    throw InvalidArgument("exploration inputs do not match the family");
  }
  Exploration out{std::vector<char>(n, 0), {}};
  std::vector<char> seen(n, 0);
  std::deque<StateIndex> queue;

  auto visit = [&](StateIndex s) {
    if (seen[s]) {
      return;
    }
    seen[s] = 1;
    if (supported(family, s, relevant)) {
      out.expanded[s] = 1;
      queue.push_back(s);
    } else {
      out.horizon.push_back(s);
    }
  };

  visit(mc.initial());
  while (!queue.empty()) {
    const StateIndex s = queue.front();
    queue.pop_front();
    for (const Entry& e : mc.row(s).entries()) {
      visit(e.key);
    }
  }
  out.horizon = make_state_set(std::move(out.horizon));
  return out;
}

StateIndex choose_to_expand(const StateSet& horizon, std::span<const char> relevant,
                            const Family& family) {
  if (horizon.empty()) {
    throw PreconditionError("horizon is empty");
  }
  StateIndex best = horizon.front();
  std::size_t best_count = std::numeric_limits<std::size_t>::max();
  for (StateIndex s : horizon) {
    std::size_t count = 0;
    for (ParamIndex k : family.support(s)) {
      if (!relevant[k] && family.is_multi_valued(k)) {
        ++count;
      }
    }
    if (count < best_count) {
      best = s;
      best_count = count;
    }
  }
  return best;
}

std::vector<double> trivial_gamma(const Property& property, std::size_t num_states) {
  return std::vector<double>(num_states, property.is_safety() ? 0.0 : 1.0);
}

ConflictResult construct_conflict(const Mc& mc, const Family& family, const Realization& r,
                                  const Property& property, std::span<const double> gamma,
                                  const Subfamily& scope, const SolverOptions& options,
                                  double eta) {
  validate_realization(family, r);
  if (mc.num_states() != family.num_states()) {
    throw InvalidArgument("member MC does not match the family");
  }
  if (!scope.contains(r)) {
    throw PreconditionError("realization lies outside the conflict scope");
  }

  // Parameters fixed within the scope cannot discriminate members; treat them as known.
  std::vector<char> relevant(family.num_params(), 0);
  for (ParamIndex k = 0; k < family.num_params(); ++k) {
    relevant[k] = scope.is_singleton(k) ? 1 : 0;
  }

  ConflictResult result;
  std::optional<double> previous;
  while (true) {
    const Exploration exploration = reachable_via_holes(mc, family, relevant);
    const Rerouting rerouted = reroute(mc, exploration.expanded, gamma, property.target);
    const double value = mc_reach(rerouted.mc, rerouted.target, options)[mc.initial()];
    ++result.model_checks;

    if (evaluate(value, property, eta) == Verdict::Viol) {
      for (ParamIndex k = 0; k < family.num_params(); ++k) {
        if (relevant[k] && !scope.is_singleton(k)) {
          result.conflict.relevant.push_back(k);
        }
      }
      result.conflict.reference = r;
      result.conflict.scope = std::make_shared<const Subfamily>(scope);
      return result;
    }
    if (previous) {
      const bool regressed =
          property.is_safety() ? value < *previous - eta : value > *previous + eta;
      if (regressed) {
        throw InvalidBounds("rerouting vector is not a valid bound for this member");
      }
    }
    previous = value;

    if (exploration.horizon.empty()) {
      throw PreconditionError("member " + describe(family, r) + " satisfies the property");
    }
    const StateIndex chosen = choose_to_expand(exploration.horizon, relevant, family);
    for (ParamIndex k : family.support(chosen)) {
      relevant[k] = 1;
    }
  }
}

Conflict minimal_conflict(const Family& family, const Realization& r, const Property& property,
                          const Subfamily& scope, const SolverOptions& options, double eta) {
  validate_realization(family, r);
  if (!scope.contains(r)) {
    throw PreconditionError("realization lies outside the conflict scope");
  }
  if (scope.member_count() > kMinimalOracleMemberLimit) {
    throw ResourceLimit("minimal-conflict oracle is limited to " +
                        std::to_string(kMinimalOracleMemberLimit) + " members");
  }
  std::vector<ParamIndex> candidates;
  for (ParamIndex k = 0; k < family.num_params(); ++k) {
    if (!scope.is_singleton(k)) {
      candidates.push_back(k);
    }
  }
  if (candidates.size() > kMinimalOracleParamLimit) {
    throw ResourceLimit("minimal-conflict oracle is limited to " +
                        std::to_string(kMinimalOracleParamLimit) + " multi-valued parameters");
  }

  // A candidate set is a valid conflict iff no satisfying member agrees with r on all of it.
  std::vector<std::uint32_t> satisfying_agreements;
  bool reference_violates = false;
  for (const Realization& member : generalization(r, {}, scope)) {
    const double value = mc_reach(induce(family, member), property.target, options)[family.initial()];
    const bool violates = evaluate(value, property, eta) == Verdict::Viol;
    if (member == r) {
      reference_violates = violates;
    }
    if (violates) {
      continue;
    }
    std::uint32_t agree = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (member[candidates[i]] == r[candidates[i]]) {
        agree |= 1u << i;
      }
    }
    satisfying_agreements.push_back(agree);
  }
  if (!reference_violates) {
    throw PreconditionError("member " + describe(family, r) + " satisfies the property");
  }
  std::sort(satisfying_agreements.begin(), satisfying_agreements.end());
  satisfying_agreements.erase(
      std::unique(satisfying_agreements.begin(), satisfying_agreements.end()),
      satisfying_agreements.end());

  const std::size_t m = candidates.size();
  for (std::size_t size = 0; size <= m; ++size) {
    // Combinations of `size` candidate positions in lexicographic order.
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) {
      pick[i] = i;
    }
    while (true) {
      std::uint32_t mask = 0;
      for (std::size_t i : pick) {
        mask |= 1u << i;
      }
      const bool valid = std::none_of(
          satisfying_agreements.begin(), satisfying_agreements.end(),
          [mask](std::uint32_t agree) { return (mask & ~agree) == 0; });
      if (valid) {
        Conflict conflict;
        for (std::size_t i : pick) {
          conflict.relevant.push_back(candidates[i]);
        }
        conflict.reference = r;
        conflict.scope = std::make_shared<const Subfamily>(scope);
        return conflict;
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == m - size + (i - 1)) {
        --i;
      }
      if (i == 0) {
        break;
      }
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) {
        pick[j] = pick[j - 1] + 1;
      }
    }
  }
  // Unreachable: the full candidate set only admits r itself.
  throw Error("minimal-conflict search found no valid conflict");
}

}  // namespace holesynth
