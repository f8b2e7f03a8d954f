#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "holesynth/family.hpp"
#include "holesynth/numerics.hpp"

namespace holesynth {

inline constexpr std::size_t kMaxActionsPerState = 1'000'000;

/// Quotient MDP of a subfamily. Each action of state s fixes one value for every parameter in
/// supp(B(s)), drawn from the subfamily's restricted domains; `choices` records those values in
/// support order.
struct QuotientMdp {
  Mdp mdp;
  std::vector<std::vector<std::vector<StateIndex>>> choices;  // [state][action][support position]
};

QuotientMdp build_quotient(const Family& family, const Subfamily& sub);

/// lb/ub reachability bounds valid for every member of a subfamily, plus the schedulers that
/// attain them on the quotient.
struct BoundsVec {
  ValueVec lb;
  ValueVec ub;
  Scheduler min_scheduler;
  Scheduler max_scheduler;
};

BoundsVec compute_bounds(const QuotientMdp& quotient, const StateSet& target,
                         const SolverOptions& options = {});

/// Builds the quotient, solves it, and returns `sub` with the bounds cached for `target`.
/// Reuses bounds already cached (non-inherited) for the same target.
Subfamily compute_bounds(const Family& family, const Subfamily& sub, const StateSet& target,
                         const SolverOptions& options = {});

/// Parameter chosen for a split and the values going to the first part.
struct SplitDecision {
  ParamIndex parameter;
  std::vector<StateIndex> first;
  std::vector<StateIndex> second;
};

/// Picks the parameter whose local choices differ most often between the min and max
/// schedulers, counted over states reachable from the initial state under both of them (ties:
/// smallest index), and separates the value the max scheduler picks most often. Without any disagreement, halves the largest restricted domain in value order.
SplitDecision choose_split(const Family& family, const Subfamily& sub, const QuotientMdp& quotient,
                           const Scheduler& min_scheduler, const Scheduler& max_scheduler);

/// Splits `sub` into two disjoint, strictly smaller parts covering it. Both parts inherit the
/// bounds cached on `sub`.
std::pair<Subfamily, Subfamily> split_subfamily(const Family& family, const Subfamily& sub,
                                                const QuotientMdp& quotient,
                                                const Scheduler& min_scheduler,
                                                const Scheduler& max_scheduler);

/// As above, rebuilding the quotient of `sub` to interpret the schedulers.
std::pair<Subfamily, Subfamily> split_subfamily(const Family& family, const Subfamily& sub,
                                                const Scheduler& min_scheduler,
                                                const Scheduler& max_scheduler);

}  // namespace holesynth
