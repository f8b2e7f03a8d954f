#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "holesynth/family.hpp"

namespace holesynth {

/// Per-state reachability probabilities.
using ValueVec = std::vector<double>;

inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr double kDecisionTolerance = 1e-6;
inline constexpr std::size_t kMaxSweeps = 1'000'000;
inline constexpr std::size_t kExactStateLimit = 2000;

enum class Direction { AtMost, AtLeast };
enum class Optimize { Minimize, Maximize };
enum class Verdict { Sat, Viol };

/// P ⋈ λ [F target]. AtMost is a safety property, AtLeast a liveness property.
struct Property {
  Direction direction;
  double threshold;
  StateSet target;

  bool is_safety() const { return direction == Direction::AtMost; }
};

Property make_property(Direction direction, double threshold, StateSet target);

/// min/max P [F target] with relative slack epsilon in [0,1).
struct Objective {
  Optimize direction;
  StateSet target;
  double epsilon = 0.0;
};

struct Specification {
  std::vector<Property> properties;
  std::optional<Objective> objective;
};

void validate_specification(const Specification& spec, std::size_t num_states);

struct SolverOptions {
  double tolerance = kDefaultTolerance;
  /// Called every `observe_every` sweeps with the current iterate (testing hook).
  std::function<void(std::size_t sweep, std::span<const double> values)> observer;
  std::size_t observe_every = 10;
};

/// Reachability probabilities by Gauss-Seidel value iteration after prob-0 precomputation.
/// Target states get exactly 1 and states that cannot reach the target exactly 0.
ValueVec mc_reach(const Mc& mc, const StateSet& target, const SolverOptions& options = {});

/// Same quantity by direct elimination of the linear system; limited to kExactStateLimit states.
ValueVec mc_reach_exact(const Mc& mc, const StateSet& target);

/// Markov decision process: each state offers one or more actions, each a distribution over
/// states.
class Mdp {
 public:
  Mdp(StateIndex initial, std::vector<std::vector<Distribution>> actions);

  std::size_t num_states() const { return actions_.size(); }
  StateIndex initial() const { return initial_; }
  std::span<const Distribution> actions(StateIndex s) const { return actions_[s]; }
  std::size_t num_actions(StateIndex s) const { return actions_[s].size(); }

 private:
  StateIndex initial_;
  std::vector<std::vector<Distribution>> actions_;
};

/// Memoryless deterministic scheduler: one action index per state.
struct Scheduler {
  std::vector<std::size_t> choice;
};

struct MdpSolution {
  ValueVec values;
  Scheduler scheduler;
};

/// Optimal min or max reachability with an optimal scheduler. Prob-0 states (Prob0E for min,
/// Prob0A for max) are fixed to 0 before iterating.
MdpSolution mdp_extreme(const Mdp& mdp, const StateSet& target, Optimize mode,
                        const SolverOptions& options = {});

/// The MC obtained by resolving every choice of `mdp` with `scheduler`.
Mc apply_scheduler(const Mdp& mdp, const Scheduler& scheduler);

/// Threshold check with decision tolerance eta; ties resolve toward Sat.
Verdict evaluate(double value, const Property& property, double eta = kDecisionTolerance);

}  // namespace holesynth
