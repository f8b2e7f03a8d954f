#include <doctest.h>

#include "holesynth/errors.hpp"
#include "holesynth/synthesis.hpp"
#include "test_support.hpp"

using namespace holesynth;
using testing::toy4;
using testing::toy4_member;

namespace {

const StateSet kT{3};
constexpr Method kMethods[] = {Method::OneByOne, Method::Cegis, Method::Ar, Method::Hybrid};

Specification safety(double lambda) {
  return Specification{{make_property(Direction::AtMost, lambda, kT)}, std::nullopt};
}

Specification objective(Optimize dir, double eps = 0.0) {
  return Specification{{}, Objective{dir, kT, eps}};
}

}  // namespace

TEST_CASE("method names") {
  for (Method m : kMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK_FALSE(parse_method("smt"));
  CHECK(to_string(Outcome::Infeasible) == "infeasible");
}

TEST_CASE("one-by-one on toy4") {
  const Family f = toy4();
  SynthesisResult r = one_by_one(f, safety(0.3));
  CHECK(r.verdict == Outcome::Feasible);
  CHECK(r.realization == toy4_member(3));
  REQUIRE(r.property_values.size() == 1);
  CHECK(r.property_values[0] == doctest::Approx(0.2));
  CHECK(r.stats.checked == 4);

  r = one_by_one(f, safety(0.1));
  CHECK(r.verdict == Outcome::Infeasible);
  CHECK_FALSE(r.realization);
  CHECK(r.stats.checked == 4);

  r = one_by_one(f, objective(Optimize::Minimize));
  CHECK(r.verdict == Outcome::Optimal);
  CHECK(r.realization == toy4_member(3));
  CHECK(*r.objective_value == doctest::Approx(0.2));

  SynthesisOptions capped;
  capped.member_cap = 3;
  CHECK_THROWS_AS(one_by_one(f, safety(0.3), capped), ResourceLimit);
}

TEST_CASE("CEGIS on toy4 generalizes with family bounds") {
  const Family f = toy4();
  SynthesisResult r = cegis_synthesize(f, safety(0.3));
  CHECK(r.verdict == Outcome::Feasible);
  CHECK(r.realization == toy4_member(3));
  CHECK(r.stats.cegis_iterations <= 3);
  CHECK(r.stats.pruned >= 1);

  SynthesisOptions trivial;
  trivial.bounds = BoundsMode::Trivial;
  r = cegis_synthesize(f, safety(0.3), trivial);
  CHECK(r.verdict == Outcome::Feasible);
  CHECK(r.realization == toy4_member(3));
  CHECK(r.stats.cegis_iterations == 4);
  CHECK(r.stats.pruned == 0);
}

TEST_CASE("CEGIS run with zero budget does nothing") {
  const Family f = toy4();
  Synthesizer synth(f, safety(0.3), {});
  FamilyEntry entry{Subfamily(f)};
  const StepReport step = synth.cegis_run(entry, 0.0);
  CHECK_FALSE(step.decided);
  CHECK_FALSE(step.exhausted);
  CHECK(step.pruned == 0);
  CHECK(entry.remaining() == 4);
  CHECK(synth.stats().model_checks == 0);
}

TEST_CASE("AR step on the full toy4 family splits on X") {
  const Family f = toy4();
  Synthesizer synth(f, safety(0.3), {});
  HybridState state;
  state.queue.emplace_back(Subfamily(f));
  const StepReport step = synth.ar_run(state);
  CHECK_FALSE(step.decided);
  CHECK(step.cost == 2.0);
  REQUIRE(state.queue.size() == 2);
  CHECK(state.queue[0].sub.domain(0).size() == 1);
  CHECK(state.queue[0].sub.domain(0)[0] == 1);
  CHECK(state.queue[1].sub.domain(0)[0] == 2);
  CHECK(state.queue[0].sub.find_bounds(kT)->inherited);

  // {X=s1}: both members exceed 0.3, so the whole subfamily is rejected.
  const StepReport left = synth.ar_run(state);
  CHECK(left.pruned == 2);
  // {X=s2}: bounds [0.2, 0.4] are inconclusive and Y is split.
  synth.ar_run(state);
  REQUIRE(state.queue.size() == 2);
  CHECK(state.queue[0].sub.member_count() == 1);
}

TEST_CASE("AR accepts a wholly satisfying family at once") {
  const SynthesisResult r = ar_synthesize(toy4(), safety(0.9));
  CHECK(r.verdict == Outcome::Feasible);
  CHECK(r.realization == toy4_member(0));
  CHECK(r.stats.ar_iterations == 1);
}

TEST_CASE("all methods on toy4") {
  for (Method m : kMethods) {
    CAPTURE(to_string(m));
    SynthesisResult r = synthesize(toy4(), safety(0.3), m);
    CHECK(r.verdict == Outcome::Feasible);
    CHECK(r.realization == toy4_member(3));
    r = synthesize(toy4(), safety(0.1), m);
    CHECK(r.verdict == Outcome::Infeasible);
    CHECK(r.stats.pruned + r.stats.checked == 4);
  }
}

TEST_CASE("time allocation factor") {
  CHECK(update_delta(3.0, 3.0) == 1.0);
  CHECK(update_delta(1.0, 0.0) == kMaxDelta);
  CHECK(update_delta(0.0, 1.0) == kMinDelta);
  CHECK(update_delta(1000.0, 1.0) == kMaxDelta);
  CHECK(update_delta(1.0, 4.0) == 0.25);
}

TEST_CASE("optimal synthesis on toy4") {
  for (Method m : kMethods) {
    CAPTURE(to_string(m));
    SynthesisResult r = optimal_synthesize(toy4(), objective(Optimize::Minimize), m);
    CHECK(r.verdict == Outcome::Optimal);
    CHECK(r.realization == toy4_member(3));
    CHECK(*r.objective_value == doctest::Approx(0.2).epsilon(1e-6));

    r = optimal_synthesize(toy4(), objective(Optimize::Maximize), m);
    CHECK(r.realization == toy4_member(0));
    CHECK(*r.objective_value == doctest::Approx(0.8).epsilon(1e-6));

    r = optimal_synthesize(toy4(), objective(Optimize::Minimize, 0.05), m);
    CHECK(*r.objective_value <= 0.2 * 1.05 + 1e-6);
  }
  CHECK_THROWS_AS(optimal_synthesize(toy4(), safety(0.3), Method::Ar), InvalidArgument);
}

TEST_CASE("optimal synthesis under a constraint") {
  // Maximize reaching t among members that reach t with probability at most 0.5.
  Specification spec = safety(0.5);
  spec.objective = Objective{Optimize::Maximize, kT, 0.0};
  for (Method m : kMethods) {
    CAPTURE(to_string(m));
    const SynthesisResult r = optimal_synthesize(toy4(), spec, m);
    CHECK(r.realization == toy4_member(2));
    CHECK(*r.objective_value == doctest::Approx(0.4).epsilon(1e-6));
  }
  spec.properties[0].threshold = 0.1;
  CHECK(optimal_synthesize(toy4(), spec, Method::Hybrid).verdict == Outcome::Infeasible);
}

TEST_CASE("methods agree on random instances") {
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const testing::Instance inst = testing::random_instance(seed);
    const bool expected = testing::brute_feasible(inst.family, inst.spec);
    (expected ? feasible : infeasible)++;
    const MemberCount total = Subfamily(inst.family).member_count();
    for (Method m : kMethods) {
      CAPTURE(seed);
      CAPTURE(to_string(m));
      const SynthesisResult r = synthesize(inst.family, inst.spec, m);
      CHECK((r.verdict == Outcome::Feasible) == expected);
      if (r.realization) {
        for (const Property& p : inst.spec.properties) {
          CHECK(testing::satisfies(testing::member_value(inst.family, *r.realization, p.target), p));
        }
      } else {
        CHECK(r.stats.pruned + r.stats.checked == total);
      }
      if (m == Method::Ar) CHECK(r.stats.ar_iterations <= 2 * total - 1);
    }
  }
  CHECK(feasible > 0);
  CHECK(infeasible > 0);
}

TEST_CASE("trivial-bound CEGIS and wall-clock hybrid agree too") {
  SynthesisOptions trivial;
  trivial.bounds = BoundsMode::Trivial;
  SynthesisOptions wall;
  wall.cost_mode = CostMode::WallClock;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const testing::Instance inst = testing::random_instance(seed);
    const bool expected = testing::brute_feasible(inst.family, inst.spec);
    CHECK((cegis_synthesize(inst.family, inst.spec, trivial).verdict == Outcome::Feasible) == expected);
    CHECK((hybrid_synthesize(inst.family, inst.spec, wall).verdict == Outcome::Feasible) == expected);
  }
}

TEST_CASE("hybrid is deterministic in deterministic cost mode") {
  const testing::Instance inst = testing::random_instance(7);
  const SynthesisResult a = hybrid_synthesize(inst.family, inst.spec);
  const SynthesisResult b = hybrid_synthesize(inst.family, inst.spec);
  CHECK(a.realization == b.realization);
  CHECK(a.stats.model_checks == b.stats.model_checks);
  CHECK(a.stats.rounds == b.stats.rounds);
  CHECK(a.stats.delta == b.stats.delta);
  CHECK(a.stats.delta >= kMinDelta);
  CHECK(a.stats.delta <= kMaxDelta);
}

TEST_CASE("optimal synthesis matches brute force on random instances") {
  for (std::uint64_t seed = 200; seed < 215; ++seed) {
    const testing::Instance inst = testing::random_instance(seed);
    const StateSet target = testing::random_family_target(inst.family);
    const double lo = *std::min_element(inst.values.begin(), inst.values.end());
    const double hi = *std::max_element(inst.values.begin(), inst.values.end());
    for (Method m : {Method::Cegis, Method::Ar, Method::Hybrid}) {
      CAPTURE(seed);
      CAPTURE(to_string(m));
      Specification spec{{}, Objective{Optimize::Minimize, target, 0.0}};
      SynthesisResult r = optimal_synthesize(inst.family, spec, m);
      CHECK(std::abs(*r.objective_value - lo) <= 1e-6);
      spec.objective->direction = Optimize::Maximize;
      r = optimal_synthesize(inst.family, spec, m);
      CHECK(std::abs(*r.objective_value - hi) <= 1e-6);
      spec.objective->epsilon = 0.05;
      r = optimal_synthesize(inst.family, spec, m);
      CHECK(*r.objective_value >= 0.95 * hi - 1e-6);
      spec.objective->direction = Optimize::Minimize;
      r = optimal_synthesize(inst.family, spec, m);
      CHECK(*r.objective_value <= 1.05 * lo + 1e-6);
    }
  }
}
