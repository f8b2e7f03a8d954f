#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace holesynth {

using StateIndex = std::uint32_t;
using ParamIndex = std::uint32_t;
using MemberCount = std::uint64_t;

/// Rows of a distribution must sum to one within this absolute tolerance.
inline constexpr double kStochasticTolerance = 1e-9;

/// Sorted, duplicate-free set of state indices.
using StateSet = std::vector<StateIndex>;

StateSet make_state_set(std::vector<StateIndex> states);
std::vector<char> state_mask(std::size_t num_states, const StateSet& states);

struct Entry {
  std::uint32_t key;
  double probability;

  bool operator==(const Entry&) const = default;
};

/// Finite-support probability distribution over dense integer keys (states or parameters).
/// Entries are kept sorted by key; duplicate keys are merged and zero entries dropped.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<Entry> entries);

  static Distribution point(std::uint32_t key);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double probability(std::uint32_t key) const;
  double total() const;

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Discrete-time Markov chain over states 0..n-1.
class Mc {
 public:
  Mc(StateIndex initial, std::vector<Distribution> rows);

  std::size_t num_states() const { return rows_.size(); }
  StateIndex initial() const { return initial_; }
  const Distribution& row(StateIndex s) const { return rows_[s]; }
  bool is_absorbing(StateIndex s) const;

 private:
  StateIndex initial_;
  std::vector<Distribution> rows_;
};

struct Parameter {
  std::string name;
  std::vector<StateIndex> domain;  // declared value order

  bool operator==(const Parameter&) const = default;
};

/// Family of Markov chains: every state carries a distribution over parameters,
/// and each parameter ranges over a domain of target states.
class Family {
 public:
  Family(std::vector<std::string> state_names, StateIndex initial,
         std::vector<Parameter> parameters, std::vector<Distribution> templates);

  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_params() const { return parameters_.size(); }
  StateIndex initial() const { return initial_; }

  const std::string& state_name(StateIndex s) const { return state_names_[s]; }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const Parameter& parameter(ParamIndex k) const { return parameters_[k]; }
  const std::vector<Parameter>& parameters() const { return parameters_; }
  const Distribution& state_template(StateIndex s) const { return templates_[s]; }
  const std::vector<Distribution>& templates() const { return templates_; }

  /// Parameters with positive weight in the template of `s`, ascending.
  std::span<const ParamIndex> support(StateIndex s) const { return supports_[s]; }

  std::optional<StateIndex> find_state(std::string_view name) const;
  std::optional<ParamIndex> find_parameter(std::string_view name) const;

  /// Position of `value` in the declared domain of `k`, or nullopt if absent.
  std::optional<std::size_t> value_position(ParamIndex k, StateIndex value) const;

  bool is_multi_valued(ParamIndex k) const { return parameters_[k].domain.size() > 1; }
  std::size_t multi_valued_count() const;

  bool operator==(const Family& other) const;

 private:
  std::vector<std::string> state_names_;
  StateIndex initial_;
  std::vector<Parameter> parameters_;
  std::vector<Distribution> templates_;
  std::vector<std::vector<ParamIndex>> supports_;
  std::vector<std::vector<std::int32_t>> positions_;  // [param][state] -> domain position or -1
  std::unordered_map<std::string, StateIndex> state_index_;
  std::unordered_map<std::string, ParamIndex> param_index_;
};

/// Total assignment of every parameter to a state value, indexed by parameter.
class Realization {
 public:
  Realization() = default;
  explicit Realization(std::vector<StateIndex> values) : values_(std::move(values)) {}

  StateIndex operator[](ParamIndex k) const { return values_[k]; }
  std::span<const StateIndex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  bool operator==(const Realization&) const = default;

 private:
  std::vector<StateIndex> values_;
};

void validate_realization(const Family& family, const Realization& r);
std::string describe(const Family& family, const Realization& r);

struct BoundsVec;

/// Bounds attached to a subfamily for one target set. Inherited bounds were computed
/// for an enclosing subfamily; they stay valid but may be looser than the subfamily's own.
struct CachedBounds {
  StateSet target;
  std::shared_ptr<const BoundsVec> bounds;
  bool inherited = false;
};

/// Hyper-rectangle of realizations: each parameter restricted to a non-empty subset of its
/// declared domain (kept in declared order).
class Subfamily {
 public:
  explicit Subfamily(const Family& family);
  Subfamily(const Family& family, std::vector<std::vector<StateIndex>> domains);

  std::size_t num_params() const { return domains_.size(); }
  std::span<const StateIndex> domain(ParamIndex k) const { return domains_[k]; }
  const std::vector<std::vector<StateIndex>>& domains() const { return domains_; }
  bool is_singleton(ParamIndex k) const { return domains_[k].size() == 1; }

  bool contains(const Realization& r) const;
  MemberCount member_count() const;
  Realization first_member() const;

  /// Mixed-radix rank of `r` among the members in lexicographic order (parameter 0 most
  /// significant). `r` must be a member.
  MemberCount rank(const Realization& r) const;

  /// Least member (in lexicographic order of declared domain positions) that is not smaller
  /// than `r`, which need not be a member. Nullopt if every member is smaller.
  std::optional<Realization> least_member_not_before(const Family& family,
                                                     const Realization& r) const;

  /// Copy of this subfamily with `k` restricted to `values` (a non-empty subset of its domain).
  Subfamily restricted(const Family& family, ParamIndex k, std::vector<StateIndex> values) const;

  const CachedBounds* find_bounds(const StateSet& target) const;
  Subfamily with_bounds(CachedBounds entry) const;
  /// Copy of the parent's cache, every entry marked inherited.
  void inherit_bounds(const Subfamily& parent);

  bool same_members(const Subfamily& other) const { return domains_ == other.domains_; }

 private:
  Subfamily() = default;

  std::vector<std::vector<StateIndex>> domains_;
  std::vector<CachedBounds> bounds_;
};

MemberCount member_count(const Subfamily& sub);

/// Relevant parameters of a counterexample together with the violating realization they
/// were derived from. Pruning applies to generalization(reference, relevant) within scope.
struct Conflict {
  std::vector<ParamIndex> relevant;  // ascending
  Realization reference;
  std::shared_ptr<const Subfamily> scope;

  bool covers(const Realization& r) const;
};

/// The member MC of `r`: B_r(s, s') sums the template weights of every parameter mapped to s'.
Mc induce(const Family& family, const Realization& r);

/// All members of `scope` agreeing with `r` on `relevant`, in lexicographic order.
std::vector<Realization> generalization(const Realization& r, std::span<const ParamIndex> relevant,
                                        const Subfamily& scope);

/// Walks the members of a subfamily in lexicographic order, skipping members covered by
/// conflicts. Skips jump over whole blocks: a member covered by a conflict whose last relevant
/// parameter is j shares that cover with every member up to the next value of j.
class UnprunedCursor {
 public:
  explicit UnprunedCursor(const Subfamily& sub);
  /// Starts at `position`, which must be a member of `sub` (or nullopt for exhausted).
  UnprunedCursor(const Subfamily& sub, std::optional<Realization> position);

  /// Next member at or after the cursor not covered by any conflict; the cursor moves past it.
  std::optional<Realization> next(std::span<const Conflict> conflicts);

  bool exhausted() const { return !position_.has_value(); }
  const std::optional<Realization>& position() const { return position_; }
  /// Members passed over as covered since construction.
  MemberCount skipped() const { return skipped_; }
  /// Members not yet traversed (including the current position).
  MemberCount remaining() const;

 private:
  // Increments digit `k` with carry toward parameter 0; exhausts on overflow.
  void advance_at(ParamIndex k);

  const Subfamily* sub_;
  std::optional<Realization> position_;
  std::vector<std::size_t> digits_;
  MemberCount skipped_ = 0;
};

/// Members of `sub` outside every conflict's generalization, in lexicographic order.
std::vector<Realization> iterate_unpruned(const Subfamily& sub, std::span<const Conflict> conflicts);

}  // namespace holesynth
