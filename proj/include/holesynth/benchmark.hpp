#pragma once

#include <cstdint>

#include "holesynth/family.hpp"

namespace holesynth {

struct BenchmarkConfig {
  std::size_t states = 10;  // including the goal and sink states
  std::size_t params = 3;   // holes; two fixed single-valued edges are added on top
  std::size_t domain = 2;
  std::uint64_t seed = 0;
};

/// Deterministic random family: internal states s0..s{n-3} arranged in layers with forward
/// edges and occasional back edges, plus an absorbing "goal" and "sink". Every internal state
/// references one to three holes and every hole is used by at least one state.
Family generate_benchmark(const BenchmarkConfig& config);

}  // namespace holesynth
