#include "holesynth/synthesis.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "holesynth/errors.hpp"

namespace holesynth {

std::optional<Method> parse_method(std::string_view text) {
  if (text == "onebyone") return Method::OneByOne;
  if (text == "cegis") return Method::Cegis;
  if (text == "ar") return Method::Ar;
  if (text == "hybrid") return Method::Hybrid;
  return std::nullopt;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::OneByOne: return "onebyone";
    case Method::Cegis: return "cegis";
    case Method::Ar: return "ar";
    case Method::Hybrid: return "hybrid";
  }
  return "?";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Feasible: return "feasible";
    case Outcome::Infeasible: return "infeasible";
    case Outcome::Optimal: return "optimal";
    case Outcome::Undecided: return "undecided";
  }
  return "?";
}

double update_delta(double sigma_cegis, double sigma_ar) {
  if (sigma_ar <= 0.0) {
    return kMaxDelta;
  }
  return std::clamp(sigma_cegis / sigma_ar, kMinDelta, kMaxDelta);
}

CostMeter::CostMeter(CostMode mode) : mode_(mode), start_(std::chrono::steady_clock::now()) {}

double CostMeter::units() const {
  if (mode_ == CostMode::Deterministic) {
    return static_cast<double>(checks_);
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

MemberCount FamilyEntry::remaining() const {
  return cursor ? sub.member_count() - sub.rank(*cursor) : 0;
}

// ---------------------------------------------------------------------------
// Synthesizer

Synthesizer::Synthesizer(const Family& family, Specification spec, SynthesisOptions options)
    : family_(family),
      spec_(std::move(spec)),
      options_(std::move(options)),
      constraints_(spec_.properties),
      meter_(options_.cost_mode) {
  validate_specification(spec_, family_.num_states());
  if (spec_.objective) {
    // Unconstrained until the first solution arrives.
    const bool minimize = spec_.objective->direction == Optimize::Minimize;
    constraints_.push_back(Property{minimize ? Direction::AtMost : Direction::AtLeast,
                                    minimize ? 1.0 : 0.0, spec_.objective->target});
  }
}

Synthesizer::MemberCheck Synthesizer::check_member(const Realization& r) {
  MemberCheck out{induce(family_, r), {}, {}};
  std::map<StateSet, double> by_target;
  out.values.reserve(constraints_.size());
  for (std::size_t j = 0; j < constraints_.size(); ++j) {
    const Property& p = constraints_[j];
    auto it = by_target.find(p.target);
    if (it == by_target.end()) {
      const double v = mc_reach(out.mc, p.target, options_.solver)[family_.initial()];
      meter_.charge(1);
      ++stats_.model_checks;
      it = by_target.emplace(p.target, v).first;
    }
    out.values.push_back(it->second);
    if (evaluate(it->second, p, options_.eta) == Verdict::Viol) {
      out.violated.push_back(j);
    }
  }
  return out;
}

bool Synthesizer::accept(const Realization& r, const std::vector<double>& values) {
  best_ = Solution{r, values};
  if (!optimizing()) {
    return true;
  }
  const double v = values.back();
  const double eps = spec_.objective->epsilon;
  const double eta = options_.eta;
  Property& objective = constraints_.back();
  if (spec_.objective->direction == Optimize::Minimize) {
    objective.threshold = v / (1.0 + eps) - 2.0 * eta;
    saturated_ = objective.threshold + eta < 0.0;
  } else {
    objective.threshold = v / (1.0 - eps) + 2.0 * eta;
    saturated_ = objective.threshold - eta > 1.0;
  }
  return saturated_;
}

std::vector<double> Synthesizer::gamma_for(const Subfamily& sub, const Property& property) const {
  if (options_.bounds == BoundsMode::Family) {
    if (const CachedBounds* cached = sub.find_bounds(property.target)) {
      return property.is_safety() ? cached->bounds->lb : cached->bounds->ub;
    }
  }
  return trivial_gamma(property, family_.num_states());
}

Subfamily Synthesizer::bound(const Subfamily& sub) {
  Subfamily out = sub;
  std::optional<QuotientMdp> quotient;
  for (const Property& p : constraints_) {
    const CachedBounds* cached = out.find_bounds(p.target);
    if (cached && !cached->inherited) {
      continue;
    }
    if (!quotient) {
      quotient = build_quotient(family_, out);
    }
    auto bounds = std::make_shared<const BoundsVec>(compute_bounds(*quotient, p.target,
                                                                   options_.solver));
    meter_.charge(2);
    stats_.model_checks += 2;
    out = out.with_bounds(CachedBounds{p.target, std::move(bounds), false});
  }
  return out;
}

StepReport Synthesizer::ar_run(HybridState& state) {
  if (state.queue.empty()) {
    throw PreconditionError("AR called on an empty queue");
  }
  StepReport report;
  const double start = meter_.units();
  FamilyEntry entry = std::move(state.queue.front());
  state.queue.pop_front();
  if (!entry.cursor) {
    return report;
  }
  entry.sub = bound(entry.sub);
  ++stats_.ar_iterations;

  const MemberCount remaining = entry.remaining();
  const StateIndex init = family_.initial();
  const double eta = options_.eta;

  bool any_violated = false;
  bool all_satisfied = true;
  std::optional<std::size_t> undecided;
  for (std::size_t j = 0; j < constraints_.size(); ++j) {
    const Property& p = constraints_[j];
    const BoundsVec& b = *entry.sub.find_bounds(p.target)->bounds;
    const double lo = b.lb[init];
    const double hi = b.ub[init];
    bool sat_all = false;
    bool viol_all = false;
    if (p.is_safety()) {
      sat_all = hi <= p.threshold + eta;
      viol_all = lo > p.threshold + eta;
    } else {
      sat_all = lo >= p.threshold - eta;
      viol_all = hi < p.threshold - eta;
    }
    any_violated = any_violated || viol_all;
    all_satisfied = all_satisfied && sat_all;
    if (!sat_all && !undecided) {
      undecided = j;
    }
  }

  auto finish_step = [&] {
    report.cost = meter_.units() - start;
    return report;
  };

  if (any_violated) {
    stats_.pruned += remaining;
    report.pruned = remaining;
    return finish_step();
  }

  if (entry.sub.member_count() == 1) {
    const Realization r = entry.sub.first_member();
    MemberCheck check = check_member(r);
    stats_.checked += remaining;
    report.pruned = remaining;
    if (check.violated.empty()) {
      report.decided = accept(r, check.values);
    }
    return finish_step();
  }

  if (all_satisfied) {
    const Realization r = entry.sub.first_member();
    MemberCheck check = check_member(r);
    if (check.violated.empty()) {
      report.decided = accept(r, check.values);
      if (!report.decided) {
        // Optimal mode: the subfamily may hold better members under the tightened objective.
        state.queue.push_front(std::move(entry));
      }
      return finish_step();
    }
    undecided = check.violated.front();
  }

  const BoundsVec& b = *entry.sub.find_bounds(constraints_[*undecided].target)->bounds;
  const QuotientMdp quotient = build_quotient(family_, entry.sub);
  auto [first, second] =
      split_subfamily(family_, entry.sub, quotient, b.min_scheduler, b.max_scheduler);
  for (Subfamily* child : {&first, &second}) {
    FamilyEntry next(std::move(*child));
    next.cursor = next.sub.least_member_not_before(family_, *entry.cursor);
    if (!next.cursor) {
      continue;
    }
    for (const Conflict& c : entry.conflicts) {
      const bool relevant = std::all_of(c.relevant.begin(), c.relevant.end(), [&](ParamIndex k) {
        const auto dom = next.sub.domain(k);
        return std::find(dom.begin(), dom.end(), c.reference[k]) != dom.end();
      });
      if (relevant) {
        next.conflicts.push_back(c);
      }
    }
    state.queue.push_back(std::move(next));
  }
  return finish_step();
}

StepReport Synthesizer::cegis_run(FamilyEntry& entry, double budget) {
  StepReport report;
  const double start = meter_.units();
  if (!entry.cursor) {
    report.exhausted = true;
    return report;
  }

  std::vector<std::vector<double>> gammas;
  gammas.reserve(constraints_.size());
  for (const Property& p : constraints_) {
    gammas.push_back(gamma_for(entry.sub, p));
  }

  UnprunedCursor cursor(entry.sub, entry.cursor);
  while (meter_.units() - start < budget) {
    const MemberCount skipped_before = cursor.skipped();
    std::optional<Realization> r = cursor.next(entry.conflicts);
    const MemberCount skipped = cursor.skipped() - skipped_before;
    stats_.pruned += skipped;
    report.pruned += skipped;
    if (!r) {
      report.exhausted = true;
      break;
    }
    ++stats_.cegis_iterations;
    ++stats_.checked;
    ++report.pruned;

    MemberCheck check = check_member(*r);
    if (check.violated.empty()) {
      if (accept(*r, check.values)) {
        report.decided = true;
        break;
      }
      // The tightened objective now excludes this member.
      check.violated.push_back(constraints_.size() - 1);
    }
    for (std::size_t j : check.violated) {
      ConflictResult ce = construct_conflict(check.mc, family_, *r, constraints_[j], gammas[j],
                                             entry.sub, options_.solver, options_.eta);
      meter_.charge(ce.model_checks);
      stats_.model_checks += ce.model_checks;
      ++stats_.conflicts;
      entry.conflicts.push_back(std::move(ce.conflict));
    }
  }
  entry.cursor = cursor.position();
  report.exhausted = report.exhausted || !entry.cursor;
  report.cost = meter_.units() - start;
  return report;
}

StepReport Synthesizer::cegis_round(HybridState& state, double budget) {
  StepReport report;
  const double start = meter_.units();
  while (!state.queue.empty()) {
    const double spent = meter_.units() - start;
    if (spent >= budget) {
      break;
    }
    StepReport step = cegis_run(state.queue.front(), budget - spent);
    report.pruned += step.pruned;
    if (step.decided) {
      report.decided = true;
      break;
    }
    if (!step.exhausted) {
      break;
    }
    state.queue.pop_front();
  }
  report.cost = meter_.units() - start;
  return report;
}

SynthesisResult Synthesizer::finish() {
  SynthesisResult result;
  if (best_) {
    result.verdict = optimizing() ? Outcome::Optimal : Outcome::Feasible;
    result.realization = best_->realization;
    result.property_values.assign(best_->values.begin(),
                                  best_->values.begin() +
                                      static_cast<std::ptrdiff_t>(spec_.properties.size()));
    if (optimizing()) {
      result.objective_value = best_->values.back();
    }
  } else {
    result.verdict = Outcome::Infeasible;
  }
  result.stats = stats_;
  return result;
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

struct WallTimer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

SynthesisResult one_by_one(const Family& family, const Specification& spec,
                           const SynthesisOptions& options) {
  WallTimer timer;
  validate_specification(spec, family.num_states());
  const Subfamily all(family);
  const MemberCount total = all.member_count();
  if (total > options.member_cap) {
    throw ResourceLimit("family has " + std::to_string(total) + " members, above the cap of " +
                        std::to_string(options.member_cap));
  }

  SynthesisResult result;
  result.verdict = Outcome::Infeasible;
  std::optional<double> best_value;
  UnprunedCursor cursor(all);
  while (auto r = cursor.next({})) {
    const Mc mc = induce(family, *r);
    ++result.stats.checked;
    std::map<StateSet, double> by_target;
    auto value_of = [&](const StateSet& target) {
      auto it = by_target.find(target);
      if (it == by_target.end()) {
        ++result.stats.model_checks;
        it = by_target.emplace(target, mc_reach(mc, target, options.solver)[family.initial()])
                 .first;
      }
      return it->second;
    };
    std::vector<double> values;
    bool satisfied = true;
    for (const Property& p : spec.properties) {
      values.push_back(value_of(p.target));
      satisfied = satisfied && evaluate(values.back(), p, options.eta) == Verdict::Sat;
    }
    if (!satisfied) {
      continue;
    }
    if (!spec.objective) {
      result.verdict = Outcome::Feasible;
      result.realization = *r;
      result.property_values = std::move(values);
      break;
    }
    const double v = value_of(spec.objective->target);
    const bool better = !best_value || (spec.objective->direction == Optimize::Minimize
                                            ? v < *best_value
                                            : v > *best_value);
    if (better) {
      best_value = v;
      result.verdict = Outcome::Optimal;
      result.realization = *r;
      result.property_values = std::move(values);
      result.objective_value = v;
    }
  }
  result.stats.wall_seconds = timer.seconds();
  return result;
}

SynthesisResult cegis_synthesize(const Family& family, const Specification& spec,
                                 const SynthesisOptions& options) {
  WallTimer timer;
  Synthesizer synth(family, spec, options);
  FamilyEntry entry{Subfamily(family)};
  if (options.bounds == BoundsMode::Family) {
    entry.sub = synth.bound(entry.sub);
  }
  synth.cegis_run(entry, std::numeric_limits<double>::infinity());
  SynthesisResult result = synth.finish();
  result.stats.wall_seconds = timer.seconds();
  return result;
}

SynthesisResult ar_synthesize(const Family& family, const Specification& spec,
                              const SynthesisOptions& options) {
  WallTimer timer;
  Synthesizer synth(family, spec, options);
  HybridState state;
  state.queue.emplace_back(Subfamily(family));
  while (!state.queue.empty()) {
    if (synth.ar_run(state).decided) {
      break;
    }
  }
  SynthesisResult result = synth.finish();
  result.stats.wall_seconds = timer.seconds();
  return result;
}

SynthesisResult hybrid_synthesize(const Family& family, const Specification& spec,
                                  const SynthesisOptions& options) {
  WallTimer timer;
  Synthesizer synth(family, spec, options);
  HybridState state;
  state.queue.emplace_back(Subfamily(family));
  std::size_t rounds = 0;
  while (!state.queue.empty()) {
    ++rounds;
    const StepReport ar = synth.ar_run(state);
    if (ar.decided || state.queue.empty()) {
      break;
    }
    const StepReport cegis = synth.cegis_round(state, ar.cost * state.delta);
    if (cegis.decided) {
      break;
    }
    if (ar.cost > 0.0 && cegis.cost > 0.0) {
      state.sigma_ar = static_cast<double>(ar.pruned) / ar.cost;
      state.sigma_cegis = static_cast<double>(cegis.pruned) / cegis.cost;
      state.delta = update_delta(state.sigma_cegis, state.sigma_ar);
    }
  }
  SynthesisResult result = synth.finish();
  result.stats.rounds = rounds;
  result.stats.delta = state.delta;
  result.stats.wall_seconds = timer.seconds();
  return result;
}

SynthesisResult synthesize(const Family& family, const Specification& spec, Method method,
                           const SynthesisOptions& options) {
  switch (method) {
    case Method::OneByOne: return one_by_one(family, spec, options);
    case Method::Cegis: return cegis_synthesize(family, spec, options);
    case Method::Ar: return ar_synthesize(family, spec, options);
    case Method::Hybrid: return hybrid_synthesize(family, spec, options);
  }
  throw InvalidArgument("unknown synthesis method");
}

SynthesisResult optimal_synthesize(const Family& family, const Specification& spec, Method method,
                                   const SynthesisOptions& options) {
  if (!spec.objective) {
    throw InvalidArgument("optimal synthesis needs an objective");
  }
  return synthesize(family, spec, method, options);
}

}  // namespace holesynth
