#include "holesynth/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "holesynth/errors.hpp"

namespace holesynth {

StateSet make_state_set(std::vector<StateIndex> states) {
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  return states;
}

std::vector<char> state_mask(std::size_t num_states, const StateSet& states) {
  std::vector<char> mask(num_states, 0);
  for (StateIndex s : states) {
    if (s >= num_states) {
      throw InvalidArgument("state index " + std::to_string(s) + " out of range");
    }
    mask[s] = 1;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.key < b.key; });
  for (const Entry& e : entries) {
    if (!(e.probability >= 0.0 && e.probability <= 1.0 + kStochasticTolerance)) {
      std::ostringstream msg;
      msg << "probability " << e.probability << " for key " << e.key << " is outside [0,1]";
      throw InvalidArgument(msg.str());
    }
    if (e.probability == 0.0) {
      continue;
    }
    if (!entries_.empty() && entries_.back().key == e.key) {
      entries_.back().probability += e.probability;
    } else {
      entries_.push_back(e);
    }
  }
  if (entries_.empty()) {
    throw InvalidArgument("distribution has empty support");
  }
  const double sum = total();
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", expected 1";
    throw InvalidArgument(msg.str());
  }
}

Distribution Distribution::point(std::uint32_t key) {
  return Distribution({Entry{key, 1.0}});
}

double Distribution::probability(std::uint32_t key) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const Entry& e, std::uint32_t k) { return e.key < k; });
  return (it != entries_.end() && it->key == key) ? it->probability : 0.0;
}

double Distribution::total() const {
  double sum = 0.0;
  for (const Entry& e : entries_) {
    sum += e.probability;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Mc

Mc::Mc(StateIndex initial, std::vector<Distribution> rows)
    : initial_(initial), rows_(std::move(rows)) {
  if (rows_.empty()) {
    throw InvalidArgument("Markov chain has no states");
  }
  if (initial_ >= rows_.size()) {
    throw InvalidArgument("initial state out of range");
  }
  for (std::size_t s = 0; s < rows_.size(); ++s) {
    if (rows_[s].empty()) {
      throw InvalidArgument("state " + std::to_string(s) + " has no transitions");
    }
    for (const Entry& e : rows_[s].entries()) {
      if (e.key >= rows_.size()) {
        throw InvalidArgument("state " + std::to_string(s) + " has a transition to unknown state " +
                              std::to_string(e.key));
      }
    }
  }
}

bool Mc::is_absorbing(StateIndex s) const {
  const auto entries = rows_[s].entries();
  return entries.size() == 1 && entries[0].key == s;
}

// ---------------------------------------------------------------------------
// Family

Family::Family(std::vector<std::string> state_names, StateIndex initial,
               std::vector<Parameter> parameters, std::vector<Distribution> templates)
    : state_names_(std::move(state_names)),
      initial_(initial),
      parameters_(std::move(parameters)),
      templates_(std::move(templates)) {
  const std::size_t n = state_names_.size();
  if (n == 0) {
    throw InvalidArgument("family has no states");
  }
  if (initial_ >= n) {
    throw InvalidArgument("initial state out of range");
  }
  for (StateIndex s = 0; s < n; ++s) {
    if (state_names_[s].empty()) {
      throw InvalidArgument("state " + std::to_string(s) + " has an empty name");
    }
    if (!state_index_.emplace(state_names_[s], s).second) {
      throw InvalidArgument("duplicate state name '" + state_names_[s] + "'");
    }
  }

  positions_.assign(parameters_.size(), std::vector<std::int32_t>(n, -1));
  for (ParamIndex k = 0; k < parameters_.size(); ++k) {
    const Parameter& p = parameters_[k];
    if (p.name.empty()) {
      throw InvalidArgument("parameter " + std::to_string(k) + " has an empty name");
    }
    if (!param_index_.emplace(p.name, k).second) {
      throw InvalidArgument("duplicate parameter name '" + p.name + "'");
    }
    if (p.domain.empty()) {
      throw InvalidArgument("parameter '" + p.name + "' has an empty domain");
    }
    for (std::size_t i = 0; i < p.domain.size(); ++i) {
      const StateIndex v = p.domain[i];
      if (v >= n) {
        throw InvalidArgument("parameter '" + p.name + "' has a domain value out of range");
      }
      if (positions_[k][v] != -1) {
        throw InvalidArgument("parameter '" + p.name + "' lists state '" + state_names_[v] +
                              "' twice");
      }
      positions_[k][v] = static_cast<std::int32_t>(i);
    }
  }

  if (templates_.size() != n) {
    throw InvalidArgument("expected one transition template per state");
  }
  supports_.resize(n);
  for (StateIndex s = 0; s < n; ++s) {
    if (templates_[s].empty()) {
      throw InvalidArgument("state '" + state_names_[s] + "' has an empty template");
    }
    for (const Entry& e : templates_[s].entries()) {
      if (e.key >= parameters_.size()) {
        throw InvalidArgument("template of state '" + state_names_[s] +
                              "' references an undeclared parameter");
      }
      supports_[s].push_back(e.key);
    }
  }
}

std::optional<StateIndex> Family::find_state(std::string_view name) const {
  auto it = state_index_.find(std::string(name));
  if (it == state_index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<ParamIndex> Family::find_parameter(std::string_view name) const {
  auto it = param_index_.find(std::string(name));
  if (it == param_index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<std::size_t> Family::value_position(ParamIndex k, StateIndex value) const {
  if (k >= positions_.size() || value >= num_states() || positions_[k][value] < 0) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(positions_[k][value]);
}

std::size_t Family::multi_valued_count() const {
  return static_cast<std::size_t>(std::count_if(
      parameters_.begin(), parameters_.end(), [](const Parameter& p) { return p.domain.size() > 1; }));
}

bool Family::operator==(const Family& other) const {
  return state_names_ == other.state_names_ && initial_ == other.initial_ &&
         parameters_ == other.parameters_ && templates_ == other.templates_;
}

// ---------------------------------------------------------------------------
// Realization

void validate_realization(const Family& family, const Realization& r) {
  if (r.size() != family.num_params()) {
    throw InvalidArgument("realization assigns " + std::to_string(r.size()) +
                          " parameters, family has " + std::to_string(family.num_params()));
  }
  for (ParamIndex k = 0; k < r.size(); ++k) {
    if (!family.value_position(k, r[k])) {
      throw InvalidArgument("value of parameter '" + family.parameter(k).name +
                            "' is outside its domain");
    }
  }
}

std::string describe(const Family& family, const Realization& r) {
  std::string out = "{";
  for (ParamIndex k = 0; k < r.size(); ++k) {
    if (k > 0) {
      out += ", ";
    }
    out += family.parameter(k).name;
    out += "=";
    out += r[k] < family.num_states() ? family.state_name(r[k]) : std::string("?");
  }
  out += "}";
  return out;
}

// ---------------------------------------------------------------------------
// Subfamily

Subfamily::Subfamily(const Family& family) {
  domains_.reserve(family.num_params());
  for (const Parameter& p : family.parameters()) {
    domains_.push_back(p.domain);
  }
}

Subfamily::Subfamily(const Family& family, std::vector<std::vector<StateIndex>> domains)
    : domains_(std::move(domains)) {
  if (domains_.size() != family.num_params()) {
    throw InvalidArgument("subfamily must restrict every parameter");
  }
  for (ParamIndex k = 0; k < domains_.size(); ++k) {
    auto& dom = domains_[k];
    if (dom.empty()) {
      throw InvalidArgument("restricted domain of '" + family.parameter(k).name + "' is empty");
    }
    for (StateIndex v : dom) {
      if (!family.value_position(k, v)) {
        throw InvalidArgument("restricted domain of '" + family.parameter(k).name +
                              "' is not a subset of its declared domain");
      }
    }
    std::sort(dom.begin(), dom.end(), [&](StateIndex a, StateIndex b) {
      return *family.value_position(k, a) < *family.value_position(k, b);
    });
    if (std::adjacent_find(dom.begin(), dom.end()) != dom.end()) {
      throw InvalidArgument("restricted domain of '" + family.parameter(k).name +
                            "' repeats a value");
    }
  }
}

bool Subfamily::contains(const Realization& r) const {
  if (r.size() != domains_.size()) {
    return false;
  }
  for (ParamIndex k = 0; k < domains_.size(); ++k) {
    if (std::find(domains_[k].begin(), domains_[k].end(), r[k]) == domains_[k].end()) {
      return false;
    }
  }
  return true;
}

MemberCount Subfamily::member_count() const {
  MemberCount count = 1;
  for (const auto& dom : domains_) {
    const MemberCount size = dom.size();
    if (count > std::numeric_limits<MemberCount>::max() / size) {
      throw ResourceLimit("member count overflows 64 bits");
    }
    count *= size;
  }
  return count;
}

Realization Subfamily::first_member() const {
  std::vector<StateIndex> values;
  values.reserve(domains_.size());
  for (const auto& dom : domains_) {
    values.push_back(dom.front());
  }
  return Realization(std::move(values));
}

MemberCount Subfamily::rank(const Realization& r) const {
  MemberCount result = 0;
  for (ParamIndex k = 0; k < domains_.size(); ++k) {
    const auto& dom = domains_[k];
    auto it = std::find(dom.begin(), dom.end(), r[k]);
    if (it == dom.end()) {
      throw PreconditionError("rank of a realization outside the subfamily");
    }
    result = result * dom.size() + static_cast<MemberCount>(it - dom.begin());
  }
  return result;
}

std::optional<Realization> Subfamily::least_member_not_before(const Family& family,
                                                              const Realization& r) const {
  const std::size_t n = domains_.size();
  auto pos = [&](ParamIndex k, StateIndex v) { return *family.value_position(k, v); };
  // First domain value of k strictly after r[k], if any.
  auto next_above = [&](ParamIndex k) -> std::optional<StateIndex> {
    const std::size_t target = pos(k, r[k]);
    for (StateIndex v : domains_[k]) {
      if (pos(k, v) > target) {
        return v;
      }
    }
    return std::nullopt;
  };

  std::vector<StateIndex> values(r.values().begin(), r.values().end());
  // Longest prefix of r lying in the box.
  std::size_t prefix = 0;
  while (prefix < n &&
         std::find(domains_[prefix].begin(), domains_[prefix].end(), r[prefix]) !=
             domains_[prefix].end()) {
    ++prefix;
  }
  if (prefix == n) {
    return r;
  }
  // Bump the deepest position <= prefix that has a larger value available, then fill minimally.
  for (std::size_t i = prefix + 1; i-- > 0;) {
    if (auto bumped = next_above(static_cast<ParamIndex>(i))) {
      values[i] = *bumped;
      for (std::size_t j = i + 1; j < n; ++j) {
        values[j] = domains_[j].front();
      }
      return Realization(std::move(values));
    }
  }
  return std::nullopt;
}

Subfamily Subfamily::restricted(const Family& family, ParamIndex k,
                                std::vector<StateIndex> values) const {
  for (StateIndex v : values) {
    if (std::find(domains_[k].begin(), domains_[k].end(), v) == domains_[k].end()) {
      throw InvalidArgument("restriction of '" + family.parameter(k).name +
                            "' is not a subset of the current domain");
    }
  }
  auto domains = domains_;
  domains[k] = std::move(values);
  return Subfamily(family, std::move(domains));
}

const CachedBounds* Subfamily::find_bounds(const StateSet& target) const {
  for (const CachedBounds& entry : bounds_) {
    if (entry.target == target) {
      return &entry;
    }
  }
  return nullptr;
}

Subfamily Subfamily::with_bounds(CachedBounds entry) const {
  Subfamily copy = *this;
  for (CachedBounds& existing : copy.bounds_) {
    if (existing.target == entry.target) {
      existing = std::move(entry);
      return copy;
    }
  }
  copy.bounds_.push_back(std::move(entry));
  return copy;
}

void Subfamily::inherit_bounds(const Subfamily& parent) {
  bounds_ = parent.bounds_;
  for (CachedBounds& entry : bounds_) {
    entry.inherited = true;
  }
}

MemberCount member_count(const Subfamily& sub) { return sub.member_count(); }

// ---------------------------------------------------------------------------
// Conflicts and generalization

bool Conflict::covers(const Realization& r) const {
  for (ParamIndex k : relevant) {
    if (r[k] != reference[k]) {
      return false;
    }
  }
  return true;
}

Mc induce(const Family& family, const Realization& r) {
  validate_realization(family, r);
  std::vector<Distribution> rows;
  rows.reserve(family.num_states());
  std::vector<Entry> entries;
  for (StateIndex s = 0; s < family.num_states(); ++s) {
    entries.clear();
    for (const Entry& e : family.state_template(s).entries()) {
      entries.push_back(Entry{r[e.key], e.probability});
    }
    rows.emplace_back(std::move(entries));
    entries = {};
  }
  return Mc(family.initial(), std::move(rows));
}

std::vector<Realization> generalization(const Realization& r, std::span<const ParamIndex> relevant,
                                        const Subfamily& scope) {
  std::vector<std::vector<StateIndex>> domains = scope.domains();
  for (ParamIndex k : relevant) {
    if (k >= domains.size()) {
      throw InvalidArgument("conflict parameter out of range");
    }
    if (std::find(domains[k].begin(), domains[k].end(), r[k]) == domains[k].end()) {
      return {};
    }
    domains[k] = {r[k]};
  }
  std::vector<Realization> out;
  std::vector<std::size_t> digits(domains.size(), 0);
  std::vector<StateIndex> values(domains.size());
  while (true) {
    for (std::size_t k = 0; k < domains.size(); ++k) {
      values[k] = domains[k][digits[k]];
    }
    out.emplace_back(values);
    std::size_t k = domains.size();
    while (k > 0) {
      --k;
      if (++digits[k] < domains[k].size()) {
        break;
      }
      digits[k] = 0;
      if (k == 0) {
        return out;
      }
    }
    if (domains.empty()) {
      return out;
    }
  }
}

// ---------------------------------------------------------------------------
// UnprunedCursor

UnprunedCursor::UnprunedCursor(const Subfamily& sub) : UnprunedCursor(sub, sub.first_member()) {}

UnprunedCursor::UnprunedCursor(const Subfamily& sub, std::optional<Realization> position)
    : sub_(&sub), position_(std::move(position)) {
  if (position_) {
    if (!sub.contains(*position_)) {
      throw PreconditionError("cursor position outside the subfamily");
    }
    digits_.resize(sub.num_params());
    for (ParamIndex k = 0; k < sub.num_params(); ++k) {
      const auto dom = sub.domain(k);
      digits_[k] = static_cast<std::size_t>(std::find(dom.begin(), dom.end(), (*position_)[k]) -
                                            dom.begin());
    }
  }
}

MemberCount UnprunedCursor::remaining() const {
  if (!position_) {
    return 0;
  }
  return sub_->member_count() - sub_->rank(*position_);
}

void UnprunedCursor::advance_at(ParamIndex k) {
  const std::size_t n = digits_.size();
  for (std::size_t j = k + 1; j < n; ++j) {
    digits_[j] = 0;
  }
  std::size_t i = k + 1;
  while (i > 0) {
    --i;
    if (++digits_[i] < sub_->domain(static_cast<ParamIndex>(i)).size()) {
      std::vector<StateIndex> values(n);
      for (std::size_t j = 0; j < n; ++j) {
        values[j] = sub_->domain(static_cast<ParamIndex>(j))[digits_[j]];
      }
      position_ = Realization(std::move(values));
      return;
    }
    digits_[i] = 0;
  }
  position_.reset();
}

std::optional<Realization> UnprunedCursor::next(std::span<const Conflict> conflicts) {
  while (position_) {
    const Conflict* cover = nullptr;
    for (const Conflict& c : conflicts) {
      if (c.covers(*position_)) {
        cover = &c;
        break;
      }
    }
    const MemberCount before = remaining();
    if (cover == nullptr) {
      Realization current = *position_;
      if (digits_.empty()) {
        position_.reset();
      } else {
        advance_at(static_cast<ParamIndex>(digits_.size() - 1));
      }
      return current;
    }
    if (cover->relevant.empty()) {
      position_.reset();
    } else {
      advance_at(cover->relevant.back());
    }
    skipped_ += before - remaining();
  }
  return std::nullopt;
}

std::vector<Realization> iterate_unpruned(const Subfamily& sub,
                                          std::span<const Conflict> conflicts) {
  std::vector<Realization> out;
  UnprunedCursor cursor(sub);
  while (auto r = cursor.next(conflicts)) {
    out.push_back(std::move(*r));
  }
  return out;
}

}  // namespace holesynth
