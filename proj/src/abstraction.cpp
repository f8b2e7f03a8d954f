#include "holesynth/abstraction.hpp"

#include <algorithm>
#include <deque>

#include "holesynth/errors.hpp"

namespace holesynth {

QuotientMdp build_quotient(const Family& family, const Subfamily& sub) {
  if (sub.num_params() != family.num_params()) {
    throw InvalidArgument("subfamily does not belong to the family");
  }
  const std::size_t n = family.num_states();
  std::vector<std::vector<Distribution>> actions(n);
  std::vector<std::vector<std::vector<StateIndex>>> choices(n);

  std::vector<Entry> entries;
  for (StateIndex s = 0; s < n; ++s) {
    const auto support = family.support(s);
    const auto weights = family.state_template(s).entries();
    std::size_t count = 1;
    for (ParamIndex k : support) {
      count *= sub.domain(k).size();
      if (count > kMaxActionsPerState) {
        throw ResourceLimit("state '" + family.state_name(s) + "' exceeds " +
                            std::to_string(kMaxActionsPerState) + " quotient actions");
      }
    }
    actions[s].reserve(count);
    choices[s].reserve(count);

    // Odometer over the support, first support parameter most significant.
    std::vector<std::size_t> digits(support.size(), 0);
    for (std::size_t a = 0; a < count; ++a) {
      std::vector<StateIndex> choice(support.size());
      entries.clear();
      for (std::size_t i = 0; i < support.size(); ++i) {
        choice[i] = sub.domain(support[i])[digits[i]];
        entries.push_back(Entry{choice[i], weights[i].probability});
      }
      actions[s].emplace_back(entries);
      choices[s].push_back(std::move(choice));
      for (std::size_t i = support.size(); i-- > 0;) {
        if (++digits[i] < sub.domain(support[i]).size()) {
          break;
        }
        digits[i] = 0;
      }
    }
  }
  return QuotientMdp{Mdp(family.initial(), std::move(actions)), std::move(choices)};
}

BoundsVec compute_bounds(const QuotientMdp& quotient, const StateSet& target,
                         const SolverOptions& options) {
  MdpSolution lower = mdp_extreme(quotient.mdp, target, Optimize::Minimize, options);
  MdpSolution upper = mdp_extreme(quotient.mdp, target, Optimize::Maximize, options);
  return BoundsVec{std::move(lower.values), std::move(upper.values), std::move(lower.scheduler),
                   std::move(upper.scheduler)};
}

Subfamily compute_bounds(const Family& family, const Subfamily& sub, const StateSet& target,
                         const SolverOptions& options) {
  if (const CachedBounds* cached = sub.find_bounds(target); cached && !cached->inherited) {
    return sub;
  }
  const QuotientMdp quotient = build_quotient(family, sub);
  auto bounds = std::make_shared<const BoundsVec>(compute_bounds(quotient, target, options));
  return sub.with_bounds(CachedBounds{target, std::move(bounds), false});
}

namespace {

// States reachable from the initial state when every choice is resolved by `scheduler`.
std::vector<char> reachable_under(const Mdp& mdp, const Scheduler& scheduler) {
  std::vector<char> seen(mdp.num_states(), 0);
  std::deque<StateIndex> queue{mdp.initial()};
  seen[mdp.initial()] = 1;
  while (!queue.empty()) {
    const StateIndex s = queue.front();
    queue.pop_front();
    for (const Entry& e : mdp.actions(s)[scheduler.choice[s]].entries()) {
      if (!seen[e.key]) {
        seen[e.key] = 1;
        queue.push_back(e.key);
      }
    }
  }
  return seen;
}

}  // namespace

SplitDecision choose_split(const Family& family, const Subfamily& sub, const QuotientMdp& quotient,
                           const Scheduler& min_scheduler, const Scheduler& max_scheduler) {
  if (sub.member_count() < 2) {
    throw PreconditionError("cannot split a subfamily with a single member");
  }
  const std::size_t n = family.num_states();
  if (min_scheduler.choice.size() != n || max_scheduler.choice.size() != n) {
    throw InvalidArgument("schedulers do not match the quotient");
  }

  // Disagreements only count where both schedulers actually lead.
  const std::vector<char> by_min = reachable_under(quotient.mdp, min_scheduler);
  const std::vector<char> by_max = reachable_under(quotient.mdp, max_scheduler);
  std::vector<std::size_t> score(family.num_params(), 0);
  for (StateIndex s = 0; s < n; ++s) {
    if (!by_min[s] || !by_max[s]) {
      continue;
    }
    const auto support = family.support(s);
    const auto& lo = quotient.choices[s].at(min_scheduler.choice[s]);
    const auto& hi = quotient.choices[s].at(max_scheduler.choice[s]);
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (lo[i] != hi[i]) {
        ++score[support[i]];
      }
    }
  }

  std::optional<ParamIndex> best;
  for (ParamIndex k = 0; k < family.num_params(); ++k) {
    if (sub.domain(k).size() > 1 && score[k] > 0 && (!best || score[k] > score[*best])) {
      best = k;
    }
  }

  SplitDecision decision;
  if (best) {
    const ParamIndex k = *best;
    const auto domain = sub.domain(k);
    std::vector<std::size_t> freq(domain.size(), 0);
    for (StateIndex s = 0; s < n; ++s) {
      const auto support = family.support(s);
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] != k) {
          continue;
        }
        const StateIndex v = quotient.choices[s][max_scheduler.choice[s]][i];
        const auto it = std::find(domain.begin(), domain.end(), v);
        ++freq[static_cast<std::size_t>(it - domain.begin())];
      }
    }
    const auto top = static_cast<std::size_t>(
        std::max_element(freq.begin(), freq.end()) - freq.begin());
    decision.parameter = k;
    decision.first = {domain[top]};
    for (std::size_t i = 0; i < domain.size(); ++i) {
      if (i != top) {
        decision.second.push_back(domain[i]);
      }
    }
    return decision;
  }

  ParamIndex widest = 0;
  for (ParamIndex k = 1; k < family.num_params(); ++k) {
    if (sub.domain(k).size() > sub.domain(widest).size()) {
      widest = k;
    }
  }
  const auto domain = sub.domain(widest);
  const std::size_t half = domain.size() / 2;
  decision.parameter = widest;
  decision.first.assign(domain.begin(), domain.begin() + static_cast<std::ptrdiff_t>(half));
  decision.second.assign(domain.begin() + static_cast<std::ptrdiff_t>(half), domain.end());
  return decision;
}

std::pair<Subfamily, Subfamily> split_subfamily(const Family& family, const Subfamily& sub,
                                                const QuotientMdp& quotient,
                                                const Scheduler& min_scheduler,
                                                const Scheduler& max_scheduler) {
  SplitDecision decision = choose_split(family, sub, quotient, min_scheduler, max_scheduler);
  Subfamily first = sub.restricted(family, decision.parameter, std::move(decision.first));
  Subfamily second = sub.restricted(family, decision.parameter, std::move(decision.second));
  first.inherit_bounds(sub);
  second.inherit_bounds(sub);
  return {std::move(first), std::move(second)};
}

std::pair<Subfamily, Subfamily> split_subfamily(const Family& family, const Subfamily& sub,
                                                const Scheduler& min_scheduler,
                                                const Scheduler& max_scheduler) {
  return split_subfamily(family, sub, build_quotient(family, sub), min_scheduler, max_scheduler);
}

}  // namespace holesynth
