#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "holesynth/abstraction.hpp"
#include "holesynth/counterexample.hpp"
#include "holesynth/family.hpp"
#include "holesynth/numerics.hpp"

namespace holesynth {

enum class Method { OneByOne, Cegis, Ar, Hybrid };
enum class BoundsMode { Trivial, Family };
enum class CostMode { Deterministic, WallClock };
enum class Outcome { Feasible, Infeasible, Optimal, Undecided };

std::optional<Method> parse_method(std::string_view text);
std::string_view to_string(Method method);
std::string_view to_string(Outcome outcome);

inline constexpr MemberCount kDefaultMemberCap = 10'000'000;
inline constexpr double kMinDelta = 1.0 / 64.0;
inline constexpr double kMaxDelta = 64.0;

struct SynthesisOptions {
  SolverOptions solver;
  double eta = kDecisionTolerance;
  BoundsMode bounds = BoundsMode::Family;
  CostMode cost_mode = CostMode::Deterministic;
  MemberCount member_cap = kDefaultMemberCap;
};

struct SynthesisStats {
  std::size_t cegis_iterations = 0;  // candidate members model-checked by CEGIS
  std::size_t ar_iterations = 0;     // subfamilies analysed by AR
  std::size_t model_checks = 0;      // MC and MDP solver invocations
  std::size_t conflicts = 0;
  MemberCount pruned = 0;   // members rejected without an individual check
  MemberCount checked = 0;  // members rejected or accepted by an individual check
  std::size_t rounds = 0;   // hybrid rounds
  double delta = 1.0;       // final CEGIS time-allocation factor (hybrid)
  double wall_seconds = 0.0;
};

struct SynthesisResult {
  Outcome verdict = Outcome::Undecided;
  std::optional<Realization> realization;
  std::vector<double> property_values;  // one per specification property, at the witness
  std::optional<double> objective_value;
  SynthesisStats stats;
};

/// Charges solver invocations and reports spent cost units: invocation counts in deterministic
/// mode, elapsed seconds in wall-clock mode.
class CostMeter {
 public:
  explicit CostMeter(CostMode mode);

  void charge(std::size_t model_checks) { checks_ += model_checks; }
  std::size_t model_checks() const { return checks_; }
  double units() const;

 private:
  CostMode mode_;
  std::size_t checks_ = 0;
  std::chrono::steady_clock::time_point start_;
};

/// A queued subfamily with its conflict store and CEGIS cursor. Members before the cursor (in
/// lexicographic order) are already accounted for.
struct FamilyEntry {
  Subfamily sub;
  std::vector<Conflict> conflicts;
  std::optional<Realization> cursor;

  explicit FamilyEntry(Subfamily s) : sub(std::move(s)), cursor(sub.first_member()) {}
  MemberCount remaining() const;
};

struct HybridState {
  std::deque<FamilyEntry> queue;
  double delta = 1.0;
  double sigma_ar = 0.0;
  double sigma_cegis = 0.0;
};

/// Outcome of one AR analysis or one budgeted CEGIS run.
struct StepReport {
  bool decided = false;     // feasible witness found (feasibility mode)
  double cost = 0.0;        // cost units spent
  MemberCount pruned = 0;   // members eliminated during the step
  bool exhausted = false;   // CEGIS: the entry has no untraversed member left
};

/// Shared machinery of the synthesis drivers. Holds the working constraints: the specification
/// properties plus, in optimal mode, the objective constraint that tightens with every solution.
class Synthesizer {
 public:
  Synthesizer(const Family& family, Specification spec, SynthesisOptions options);

  /// Pops the front subfamily, bounds it on its quotient MDP, and accepts, rejects or splits it.
  StepReport ar_run(HybridState& state);

  /// CEGIS over one subfamily until a witness is found, the subfamily is exhausted, or
  /// `budget` cost units are spent. Uses the subfamily's cached bounds as rerouting vectors
  /// (trivial vectors in Trivial bounds mode or when none are cached).
  StepReport cegis_run(FamilyEntry& entry, double budget);

  /// CEGIS over queue entries in FIFO order within one budget; exhausted entries are removed.
  StepReport cegis_round(HybridState& state, double budget);

  /// Caches own bounds for every working target on `sub`.
  Subfamily bound(const Subfamily& sub);

  bool optimizing() const { return spec_.objective.has_value(); }
  /// True once no better solution can exist (objective threshold left [0,1]).
  bool saturated() const { return saturated_; }
  bool has_solution() const { return best_.has_value(); }

  const std::vector<Property>& constraints() const { return constraints_; }
  const SynthesisStats& stats() const { return stats_; }
  const CostMeter& meter() const { return meter_; }

  /// Final result: feasible/optimal witness if one was recorded, otherwise infeasible.
  SynthesisResult finish();

 private:
  struct MemberCheck {
    Mc mc;
    std::vector<double> values;  // per constraint
    std::vector<std::size_t> violated;
  };

  MemberCheck check_member(const Realization& r);
  // Records a satisfying member. Returns true if the search is over (feasibility mode).
  bool accept(const Realization& r, const std::vector<double>& values);
  std::vector<double> gamma_for(const Subfamily& sub, const Property& property) const;

  const Family& family_;
  Specification spec_;
  SynthesisOptions options_;
  std::vector<Property> constraints_;
  CostMeter meter_;
  SynthesisStats stats_;
  bool saturated_ = false;

  struct Solution {
    Realization realization;
    std::vector<double> values;
  };
  std::optional<Solution> best_;
};

SynthesisResult one_by_one(const Family& family, const Specification& spec,
                           const SynthesisOptions& options = {});
SynthesisResult cegis_synthesize(const Family& family, const Specification& spec,
                                 const SynthesisOptions& options = {});
SynthesisResult ar_synthesize(const Family& family, const Specification& spec,
                              const SynthesisOptions& options = {});
SynthesisResult hybrid_synthesize(const Family& family, const Specification& spec,
                                  const SynthesisOptions& options = {});

SynthesisResult synthesize(const Family& family, const Specification& spec, Method method,
                           const SynthesisOptions& options = {});

/// Optimal synthesis; `spec.objective` must be set. With epsilon > 0 the result is within a
/// factor (1 + eps) (min) or (1 - eps) (max) of the optimum.
SynthesisResult optimal_synthesize(const Family& family, const Specification& spec, Method method,
                                   const SynthesisOptions& options = {});

/// New value of the CEGIS time-allocation factor after a round with the given efficiencies
/// (pruned members per cost unit). Zero AR efficiency maps to the upper clamp.
double update_delta(double sigma_cegis, double sigma_ar);

}  // namespace holesynth
