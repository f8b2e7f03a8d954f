#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "holesynth/family.hpp"
#include "holesynth/numerics.hpp"

namespace holesynth {

/// Rerouted MC together with the states added by the rerouting.
struct Rerouting {
  Mc mc;
  StateIndex top;     // fresh target sink
  StateIndex bottom;  // fresh non-target sink
  StateSet target;    // original target plus `top`
};

/// Keeps the rows of states in `expanded`; every other state s moves to `top` with probability
/// gamma[s] and to `bottom` otherwise. `gamma` has one entry per state of `mc`; entries of
/// expanded states are ignored.
Rerouting reroute(const Mc& mc, std::span<const char> expanded, std::span<const double> gamma,
                  const StateSet& target);

/// Expanded region and exploration horizon of a partially expanded member.
struct Exploration {
  std::vector<char> expanded;  // mask over states
  StateSet horizon;
};

/// Explores `mc` from its initial state through states whose support lies inside `relevant`
/// (a mask over parameters; single-valued parameters always count as relevant). States reached
/// but carrying other parameters form the horizon.
Exploration reachable_via_holes(const Mc& mc, const Family& family, std::span<const char> relevant);

/// Horizon state with the fewest multi-valued parameters outside `relevant`; ties go to the
/// smallest index.
StateIndex choose_to_expand(const StateSet& horizon, std::span<const char> relevant,
                            const Family& family);

struct ConflictResult {
  Conflict conflict;
  std::size_t model_checks = 0;
};

/// Greedy counterexample construction. `mc` must be the member induced by `r`, which violates
/// `property`; `gamma` must bound the member's values from below (safety) or above (liveness)
/// for every member of `scope`. Every member of the returned conflict's generalization within
/// `scope` violates `property`.
ConflictResult construct_conflict(const Mc& mc, const Family& family, const Realization& r,
                                  const Property& property, std::span<const double> gamma,
                                  const Subfamily& scope, const SolverOptions& options = {},
                                  double eta = kDecisionTolerance);

/// Rerouting vector that carries no information: all zeros for safety, all ones for liveness.
std::vector<double> trivial_gamma(const Property& property, std::size_t num_states);

inline constexpr MemberCount kMinimalOracleMemberLimit = 4096;
inline constexpr std::size_t kMinimalOracleParamLimit = 16;

/// Smallest parameter set whose generalization of `r` within `scope` contains only violating
/// members, found by enumerating candidate sets by size and then lexicographically.
Conflict minimal_conflict(const Family& family, const Realization& r, const Property& property,
                          const Subfamily& scope, const SolverOptions& options = {},
                          double eta = kDecisionTolerance);

}  // namespace holesynth
