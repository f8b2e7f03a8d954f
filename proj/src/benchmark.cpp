#include "holesynth/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "holesynth/errors.hpp"

namespace holesynth {

namespace {

// Distribution objects of <random> are implementation-defined; these mappings keep the output
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

constexpr double kBackEdgeChance = 0.25;
constexpr double kFixedEdgeChance = 0.5;

}  // namespace

Family generate_benchmark(const BenchmarkConfig& config) {
  if (config.states < 3 || config.params < 1 || config.domain < 2) {
    throw InvalidArgument("benchmark needs states >= 3, params >= 1 and domain >= 2");
  }
  const std::size_t internal = config.states - 2;
  if (config.params > 3 * internal) {
    throw InvalidArgument("parameter budget infeasible: " + std::to_string(internal) +
                          " internal states hold at most " + std::to_string(3 * internal) +
                          " holes");
  }
  if (config.domain > config.states) {
    throw InvalidArgument("domain size exceeds the number of states");
  }

  Rng rng(config.seed);
  const auto goal = static_cast<StateIndex>(internal);
  const auto sink = static_cast<StateIndex>(internal + 1);

  std::vector<std::string> names;
  for (std::size_t i = 0; i < internal; ++i) {
    names.push_back("s" + std::to_string(i));
  }
  names.emplace_back("goal");
  names.emplace_back("sink");

  const auto layers = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(internal))));
  auto layer_of = [&](std::size_t s) { return s * layers / internal; };

  // Hole k goes to state k mod internal first, so every hole is used and no state exceeds
  // three; states then draw extra holes up to a random target count.
  std::vector<std::vector<ParamIndex>> uses(internal);
  for (std::size_t k = 0; k < config.params; ++k) {
    uses[k % internal].push_back(static_cast<ParamIndex>(k));
  }
  for (std::size_t s = 0; s < internal; ++s) {
    const std::size_t want = std::min<std::size_t>(1 + rng.below(3), config.params);
    while (uses[s].size() < want) {
      const auto k = static_cast<ParamIndex>(rng.below(config.params));
      if (std::find(uses[s].begin(), uses[s].end(), k) == uses[s].end()) {
        uses[s].push_back(k);
      }
    }
    std::sort(uses[s].begin(), uses[s].end());
  }

  // A hole's values lie mostly ahead of the first state using it.
  std::vector<std::size_t> owner_layer(config.params, layers);
  for (std::size_t s = 0; s < internal; ++s) {
    for (ParamIndex k : uses[s]) {
      owner_layer[k] = std::min(owner_layer[k], layer_of(s));
    }
  }
  std::vector<Parameter> parameters;
  for (std::size_t k = 0; k < config.params; ++k) {
    std::vector<StateIndex> forward{goal, sink};
    std::vector<StateIndex> backward;
    for (std::size_t s = 0; s < internal; ++s) {
      (layer_of(s) > owner_layer[k] ? forward : backward).push_back(static_cast<StateIndex>(s));
    }
    rng.shuffle(forward);
    rng.shuffle(backward);
    std::vector<StateIndex> domain(forward.begin(),
                                   forward.begin() + static_cast<std::ptrdiff_t>(
                                                         std::min(config.domain, forward.size())));
    std::size_t b = 0;
    while (domain.size() < config.domain) {
      domain.push_back(backward[b++]);
    }
    if (b < backward.size() && rng.chance(kBackEdgeChance)) {
      domain.back() = backward[b];
    }
    std::sort(domain.begin(), domain.end());
    parameters.push_back(Parameter{"h" + std::to_string(k), std::move(domain)});
  }
  const auto goal_edge = static_cast<ParamIndex>(config.params);
  const auto sink_edge = static_cast<ParamIndex>(config.params + 1);
  parameters.push_back(Parameter{"goal_edge", {goal}});
  parameters.push_back(Parameter{"sink_edge", {sink}});

  std::vector<Distribution> templates;
  for (std::size_t s = 0; s < internal; ++s) {
    std::vector<ParamIndex> keys = uses[s];
    if (rng.chance(kFixedEdgeChance)) {
      keys.push_back(goal_edge);
    }
    if (rng.chance(kFixedEdgeChance)) {
      keys.push_back(sink_edge);
    }
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      weights.push_back(0.1 + 0.9 * rng.uniform());
      total += weights.back();
    }
    std::vector<Entry> entries;
    double assigned = 0.0;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      const double p = weights[i] / total;
      entries.push_back(Entry{keys[i], p});
      assigned += p;
    }
    entries.push_back(Entry{keys.back(), 1.0 - assigned});
    templates.emplace_back(std::move(entries));
  }
  templates.emplace_back(std::vector<Entry>{Entry{goal_edge, 1.0}});
  templates.emplace_back(std::vector<Entry>{Entry{sink_edge, 1.0}});

  return Family(std::move(names), 0, std::move(parameters), std::move(templates));
}

}  // namespace holesynth
