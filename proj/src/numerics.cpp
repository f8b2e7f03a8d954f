#include "holesynth/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "holesynth/errors.hpp"

namespace holesynth {

namespace {

void check_tolerance(double tol) {
  if (!(tol > 0.0)) {
    throw InvalidArgument("solver tolerance must be positive");
  }
}

std::vector<char> target_mask(std::size_t num_states, const StateSet& target) {
  if (target.empty()) {
    throw InvalidArgument("target set is empty");
  }
  return state_mask(num_states, target);
}

// States from which some target is reachable in the graph of `rows`.
template <typename Successors>
std::vector<char> backward_reachable(std::size_t n, const std::vector<char>& is_target,
                                     Successors&& successors) {
  std::vector<std::vector<StateIndex>> preds(n);
  for (StateIndex s = 0; s < n; ++s) {
    successors(s, [&](StateIndex t) { preds[t].push_back(s); });
  }
  std::vector<char> reach(is_target);
  std::deque<StateIndex> queue;
  for (StateIndex s = 0; s < n; ++s) {
    if (reach[s]) {
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const StateIndex t = queue.front();
    queue.pop_front();
    for (StateIndex s : preds[t]) {
      if (!reach[s]) {
        reach[s] = 1;
        queue.push_back(s);
      }
    }
  }
  return reach;
}

double weighted_sum(const Distribution& d, const std::vector<double>& x) {
  double sum = 0.0;
  for (const Entry& e : d.entries()) {
    sum += e.probability * x[e.key];
  }
  return sum;
}

void notify(const SolverOptions& options, std::size_t sweep, const std::vector<double>& x) {
  if (options.observer && options.observe_every > 0 && sweep % options.observe_every == 0) {
    options.observer(sweep, x);
  }
}

// Stopping rule for value iteration. A small change per sweep alone does not bound the
// distance to the fixpoint when the iteration contracts slowly, so the remaining error is also
// estimated from the observed contraction rate.
class Convergence {
 public:
  explicit Convergence(double tol) : tol_(tol) {}

  bool reached(double delta) {
    bool done = delta == 0.0;
    if (!done && previous_ > 0.0 && delta < tol_) {
      const double rate = delta / previous_;
      done = rate < 1.0 && delta * rate / (1.0 - rate) <= 0.25 * tol_;
    }
    previous_ = delta;
    return done;
  }

 private:
  double tol_;
  double previous_ = 0.0;
};

}  // namespace

Property make_property(Direction direction, double threshold, StateSet target) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("threshold must lie in [0,1]");
  }
  if (target.empty()) {
    throw InvalidArgument("property target set is empty");
  }
  return Property{direction, threshold, make_state_set(std::move(target))};
}

void validate_specification(const Specification& spec, std::size_t num_states) {
  for (const Property& p : spec.properties) {
    if (!(p.threshold >= 0.0 && p.threshold <= 1.0)) {
      throw InvalidArgument("threshold must lie in [0,1]");
    }
    target_mask(num_states, p.target);
  }
  if (spec.objective) {
    if (!(spec.objective->epsilon >= 0.0 && spec.objective->epsilon < 1.0)) {
      throw InvalidArgument("objective epsilon must lie in [0,1)");
    }
    target_mask(num_states, spec.objective->target);
  }
  if (spec.properties.empty() && !spec.objective) {
    throw InvalidArgument("specification has neither properties nor an objective");
  }
}

ValueVec mc_reach(const Mc& mc, const StateSet& target, const SolverOptions& options) {
  check_tolerance(options.tolerance);
  const std::size_t n = mc.num_states();
  const auto is_target = target_mask(n, target);
  const auto can_reach = backward_reachable(n, is_target, [&](StateIndex s, auto&& emit) {
    for (const Entry& e : mc.row(s).entries()) {
      emit(e.key);
    }
  });

  ValueVec x(n, 0.0);
  std::vector<StateIndex> maybe;
  for (StateIndex s = 0; s < n; ++s) {
    if (is_target[s]) {
      x[s] = 1.0;
    } else if (can_reach[s]) {
      maybe.push_back(s);
    }
  }

  Convergence stop(options.tolerance);
  for (std::size_t sweep = 1;; ++sweep) {
    double delta = 0.0;
    for (StateIndex s : maybe) {
      const double v = weighted_sum(mc.row(s), x);
      delta = std::max(delta, std::abs(v - x[s]));
      x[s] = v;
    }
    notify(options, sweep, x);
    if (stop.reached(delta)) {
      break;
    }
    if (sweep >= kMaxSweeps) {
      throw ResourceLimit("value iteration did not converge within the sweep limit");
    }
  }
  for (StateIndex s : maybe) {
    x[s] = std::clamp(x[s], 0.0, 1.0);
  }
  return x;
}

ValueVec mc_reach_exact(const Mc& mc, const StateSet& target) {
  const std::size_t n = mc.num_states();
  if (n > kExactStateLimit) {
    throw ResourceLimit("exact solver is limited to " + std::to_string(kExactStateLimit) +
                        " states");
  }
  const auto is_target = target_mask(n, target);
  const auto can_reach = backward_reachable(n, is_target, [&](StateIndex s, auto&& emit) {
    for (const Entry& e : mc.row(s).entries()) {
      emit(e.key);
    }
  });

  ValueVec x(n, 0.0);
  std::vector<std::int64_t> index(n, -1);
  std::vector<StateIndex> maybe;
  for (StateIndex s = 0; s < n; ++s) {
    if (is_target[s]) {
      x[s] = 1.0;
    } else if (can_reach[s]) {
      index[s] = static_cast<std::int64_t>(maybe.size());
      maybe.push_back(s);
    }
  }
  const std::size_t m = maybe.size();
  if (m == 0) {
    return x;
  }

  // (I - P_maybe) y = P_{maybe,target} 1, stored row-major with the rhs as last column.
  const std::size_t cols = m + 1;
  std::vector<double> a(m * cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    a[i * cols + i] = 1.0;
    for (const Entry& e : mc.row(maybe[i]).entries()) {
      if (is_target[e.key]) {
        a[i * cols + m] += e.probability;
      } else if (index[e.key] >= 0) {
        a[i * cols + static_cast<std::size_t>(index[e.key])] -= e.probability;
      }
    }
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r * cols + col]) > std::abs(a[pivot * cols + col])) {
        pivot = r;
      }
    }
    if (pivot != col) {
      for (std::size_t c = col; c < cols; ++c) {
        std::swap(a[col * cols + c], a[pivot * cols + c]);
      }
    }
    const double diag = a[col * cols + col];
    for (std::size_t r = col + 1; r < m; ++r) {
      const double factor = a[r * cols + col] / diag;
      if (factor == 0.0) {
        continue;
      }
      for (std::size_t c = col; c < cols; ++c) {
        a[r * cols + c] -= factor * a[col * cols + c];
      }
    }
  }
  std::vector<double> y(m, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    double rhs = a[i * cols + m];
    for (std::size_t c = i + 1; c < m; ++c) {
      rhs -= a[i * cols + c] * y[c];
    }
    y[i] = rhs / a[i * cols + i];
  }
  for (std::size_t i = 0; i < m; ++i) {
    x[maybe[i]] = std::clamp(y[i], 0.0, 1.0);
  }
  return x;
}

Mdp::Mdp(StateIndex initial, std::vector<std::vector<Distribution>> actions)
    : initial_(initial), actions_(std::move(actions)) {
  if (actions_.empty()) {
    throw InvalidArgument("MDP has no states");
  }
  if (initial_ >= actions_.size()) {
    throw InvalidArgument("initial state out of range");
  }
  for (std::size_t s = 0; s < actions_.size(); ++s) {
    if (actions_[s].empty()) {
      throw InvalidArgument("state " + std::to_string(s) + " has no actions");
    }
    for (const Distribution& d : actions_[s]) {
      if (d.empty()) {
        throw InvalidArgument("state " + std::to_string(s) + " has an empty action");
      }
      for (const Entry& e : d.entries()) {
        if (e.key >= actions_.size()) {
          throw InvalidArgument("state " + std::to_string(s) +
                                " has a transition to an unknown state");
        }
      }
    }
  }
}

MdpSolution mdp_extreme(const Mdp& mdp, const StateSet& target, Optimize mode,
                        const SolverOptions& options) {
  check_tolerance(options.tolerance);
  const std::size_t n = mdp.num_states();
  const auto is_target = target_mask(n, target);
  const bool minimize = mode == Optimize::Minimize;

  // Positive set: for max, states where some scheduler reaches the target (graph
  // reachability); for min, states where every scheduler does (least fixpoint of "every
  // action has a successor inside").
  std::vector<char> positive;
  if (minimize) {
    positive = is_target;
    bool changed = true;
    while (changed) {
      changed = false;
      for (StateIndex s = 0; s < n; ++s) {
        if (positive[s]) {
          continue;
        }
        bool all = true;
        for (const Distribution& d : mdp.actions(s)) {
          bool hit = false;
          for (const Entry& e : d.entries()) {
            if (positive[e.key]) {
              hit = true;
              break;
            }
          }
          if (!hit) {
            all = false;
            break;
          }
        }
        if (all) {
          positive[s] = 1;
          changed = true;
        }
      }
    }
  } else {
    positive = backward_reachable(n, is_target, [&](StateIndex s, auto&& emit) {
      for (const Distribution& d : mdp.actions(s)) {
        for (const Entry& e : d.entries()) {
          emit(e.key);
        }
      }
    });
  }

  ValueVec x(n, 0.0);
  std::vector<StateIndex> maybe;
  for (StateIndex s = 0; s < n; ++s) {
    if (is_target[s]) {
      x[s] = 1.0;
    } else if (positive[s]) {
      maybe.push_back(s);
    }
  }

  auto best_of = [&](StateIndex s) {
    double best = minimize ? std::numeric_limits<double>::infinity() : -1.0;
    for (const Distribution& d : mdp.actions(s)) {
      const double q = weighted_sum(d, x);
      best = minimize ? std::min(best, q) : std::max(best, q);
    }
    return best;
  };

  Convergence stop(options.tolerance);
  for (std::size_t sweep = 1;; ++sweep) {
    double delta = 0.0;
    for (StateIndex s : maybe) {
      const double v = best_of(s);
      delta = std::max(delta, std::abs(v - x[s]));
      x[s] = v;
    }
    notify(options, sweep, x);
    if (stop.reached(delta)) {
      break;
    }
    if (sweep >= kMaxSweeps) {
      throw ResourceLimit("value iteration did not converge within the sweep limit");
    }
  }
  for (StateIndex s : maybe) {
    x[s] = std::clamp(x[s], 0.0, 1.0);
  }

  Scheduler scheduler{std::vector<std::size_t>(n, 0)};
  if (minimize) {
    for (StateIndex s = 0; s < n; ++s) {
      if (is_target[s]) {
        continue;
      }
      const auto actions = mdp.actions(s);
      if (!positive[s]) {
        // Stay outside the positive set forever.
        for (std::size_t a = 0; a < actions.size(); ++a) {
          const auto entries = actions[a].entries();
          if (std::none_of(entries.begin(), entries.end(),
                           [&](const Entry& e) { return positive[e.key] != 0; })) {
            scheduler.choice[s] = a;
            break;
          }
        }
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < actions.size(); ++a) {
        const double q = weighted_sum(actions[a], x);
        if (q < best) {
          best = q;
          scheduler.choice[s] = a;
        }
      }
    }
  } else {
    // Among near-optimal actions, pick ones that make progress toward the target, so that
    // end components are left whenever the optimum requires it.
    std::vector<std::vector<std::pair<StateIndex, std::size_t>>> preds(n);
    std::vector<double> best(n, 0.0);
    for (StateIndex s : maybe) {
      best[s] = best_of(s);
      const auto actions = mdp.actions(s);
      for (std::size_t a = 0; a < actions.size(); ++a) {
        if (weighted_sum(actions[a], x) < best[s] - options.tolerance) {
          continue;
        }
        for (const Entry& e : actions[a].entries()) {
          preds[e.key].emplace_back(s, a);
        }
      }
    }
    std::vector<char> attained(is_target);
    std::deque<StateIndex> queue;
    for (StateIndex s = 0; s < n; ++s) {
      if (attained[s]) {
        queue.push_back(s);
      }
    }
    while (!queue.empty()) {
      const StateIndex t = queue.front();
      queue.pop_front();
      for (auto [s, a] : preds[t]) {
        if (!attained[s]) {
          attained[s] = 1;
          scheduler.choice[s] = a;
          queue.push_back(s);
        }
      }
    }
    for (StateIndex s : maybe) {
      if (attained[s]) {
        continue;
      }
      const auto actions = mdp.actions(s);
      double top = -1.0;
      for (std::size_t a = 0; a < actions.size(); ++a) {
        const double q = weighted_sum(actions[a], x);
        if (q > top) {
          top = q;
          scheduler.choice[s] = a;
        }
      }
    }
  }
  return MdpSolution{std::move(x), std::move(scheduler)};
}

Mc apply_scheduler(const Mdp& mdp, const Scheduler& scheduler) {
  if (scheduler.choice.size() != mdp.num_states()) {
    throw InvalidArgument("scheduler does not cover every state");
  }
  std::vector<Distribution> rows;
  rows.reserve(mdp.num_states());
  for (StateIndex s = 0; s < mdp.num_states(); ++s) {
    if (scheduler.choice[s] >= mdp.num_actions(s)) {
      throw InvalidArgument("scheduler picks an invalid action at state " + std::to_string(s));
    }
    rows.push_back(mdp.actions(s)[scheduler.choice[s]]);
  }
  return Mc(mdp.initial(), std::move(rows));
}

Verdict evaluate(double value, const Property& property, double eta) {
  if (property.direction == Direction::AtMost) {
    return value <= property.threshold + eta ? Verdict::Sat : Verdict::Viol;
  }
  return value >= property.threshold - eta ? Verdict::Sat : Verdict::Viol;
}

}  // namespace holesynth
