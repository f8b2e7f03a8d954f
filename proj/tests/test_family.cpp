#include <doctest.h>

#include <set>

#include "holesynth/errors.hpp"
#include "holesynth/family.hpp"
#include "test_support.hpp"

using namespace holesynth;
using testing::toy4;
using testing::toy4_member;

TEST_CASE("distribution merges duplicate keys and drops zero entries") {
  Distribution d({{3, 0.25}, {1, 0.5}, {3, 0.25}, {7, 0.0}});
  REQUIRE(d.size() == 2);
  CHECK(d.entries()[0] == Entry{1, 0.5});
  CHECK(d.entries()[1] == Entry{3, 0.5});
  CHECK(d.probability(7) == 0.0);
  CHECK(d.total() == doctest::Approx(1.0));
}

TEST_CASE("distribution rejects invalid rows") {
  CHECK_THROWS_AS(Distribution({{0, 0.5}, {1, 0.4}}), InvalidArgument);
  CHECK_THROWS_AS(Distribution({{0, -0.1}, {1, 1.1}}), InvalidArgument);
  CHECK_THROWS_AS(Distribution(std::vector<Entry>{}), InvalidArgument);
  CHECK_THROWS_AS(Distribution({{0, 0.0}}), InvalidArgument);
  CHECK_NOTHROW(Distribution({{0, 0.5}, {1, 0.5 + 5e-10}}));
}

TEST_CASE("markov chain validation") {
  CHECK_THROWS_AS(Mc(0, {}), InvalidArgument);
  CHECK_THROWS_AS(Mc(2, {Distribution::point(0), Distribution::point(1)}), InvalidArgument);
  CHECK_THROWS_AS(Mc(0, {Distribution::point(5)}), InvalidArgument);
  const Mc mc(0, {Distribution({{0, 0.5}, {1, 0.5}}), Distribution::point(1)});
  CHECK_FALSE(mc.is_absorbing(0));
  CHECK(mc.is_absorbing(1));
}

TEST_CASE("family validation reports each defect") {
  const std::vector<Distribution> rows{Distribution::point(0), Distribution::point(0)};
  CHECK_THROWS_AS(Family({"a", "a"}, 0, {{"k", {0}}}, rows), InvalidArgument);
  CHECK_THROWS_AS(Family({"a", "b"}, 0, {{"k", {}}}, rows), InvalidArgument);
  CHECK_THROWS_AS(Family({"a", "b"}, 0, {{"k", {0}}, {"k", {1}}}, rows), InvalidArgument);
  CHECK_THROWS_AS(Family({"a", "b"}, 0, {{"k", {9}}}, rows), InvalidArgument);
  CHECK_THROWS_AS(Family({"a", "b"}, 0, {{"k", {0, 0}}}, rows), InvalidArgument);
  // Template references a parameter that does not exist.
  CHECK_THROWS_AS(Family({"a", "b"}, 0, {{"k", {0}}}, {Distribution::point(1), Distribution::point(0)}),
                  InvalidArgument);
  CHECK_THROWS_AS(Family({"a", "b"}, 0, {{"k", {0}}}, {Distribution::point(0)}), InvalidArgument);
}

TEST_CASE("toy4 structure") {
  const Family f = toy4();
  CHECK(f.num_states() == 5);
  CHECK(f.num_params() == 4);
  CHECK(f.multi_valued_count() == 2);
  CHECK(f.find_state("t") == StateIndex{3});
  CHECK_FALSE(f.find_state("nope"));
  CHECK(f.find_parameter("Y") == ParamIndex{1});
  CHECK(f.value_position(0, 2) == std::size_t{1});
  CHECK_FALSE(f.value_position(0, 3));
  const auto support = f.support(1);
  CHECK(std::vector<ParamIndex>(support.begin(), support.end()) == std::vector<ParamIndex>{1, 2, 3});
  CHECK(describe(f, toy4_member(0)) == "{X=s1, Y=t, T'=t, F'=f}");
}

TEST_CASE("induce sums the weights of parameters mapped to the same state") {
  const Family f = toy4();
  const Mc mc = induce(f, toy4_member(0));
  CHECK(mc.initial() == 0);
  CHECK(mc.row(0).probability(1) == doctest::Approx(1.0));
  CHECK(mc.row(1).probability(3) == doctest::Approx(0.8));
  CHECK(mc.row(1).probability(4) == doctest::Approx(0.2));
  CHECK(mc.row(1).size() == 2);
  CHECK(mc.is_absorbing(3));
  CHECK(mc.is_absorbing(4));
  CHECK(mc.num_states() == 5);  // s2 is unreachable but kept
}

TEST_CASE("induce rejects invalid realizations") {
  const Family f = toy4();
  CHECK_THROWS_AS(induce(f, Realization({1, 3, 3})), InvalidArgument);
  CHECK_THROWS_AS(induce(f, Realization({0, 3, 3, 4})), InvalidArgument);
}

TEST_CASE("all-singleton family has one member independent of how it is reached") {
  const Family f({"a", "b"}, 0, {{"k", {1}}}, {Distribution::point(0), Distribution::point(0)});
  const Subfamily all(f);
  CHECK(all.member_count() == 1);
  const Mc mc = induce(f, all.first_member());
  CHECK(mc.row(0).probability(1) == 1.0);
  CHECK(mc.row(1).probability(1) == 1.0);
}

TEST_CASE("induced rows stay stochastic on random families") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Family f = testing::random_family(seed, 10);
    testing::Random rng(seed + 1000);
    const auto members = testing::enumerate(Subfamily(f));
    const Realization& r = members[rng.below(members.size())];
    const Mc mc = induce(f, r);
    const auto oracle = testing::dense_member(f, r);
    for (StateIndex s = 0; s < mc.num_states(); ++s) {
      CHECK(std::abs(mc.row(s).total() - 1.0) <= 1e-9);
      for (StateIndex u = 0; u < mc.num_states(); ++u) {
        CHECK(mc.row(s).probability(u) == doctest::Approx(oracle[s][u]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("member counts") {
  const Family f = toy4();
  const Subfamily all(f);
  CHECK(all.member_count() == 4);
  CHECK(member_count(all.restricted(f, 0, {2})) == 2);
  CHECK(Subfamily(f, {{2}, {4}, {3}, {4}}).member_count() == 1);
}

TEST_CASE("member count overflow is reported") {
  std::vector<std::string> names;
  std::vector<StateIndex> dom;
  for (StateIndex s = 0; s < 16; ++s) {
    names.push_back("s" + std::to_string(s));
    dom.push_back(s);
  }
  std::vector<Parameter> params;
  for (int k = 0; k < 17; ++k) params.push_back({"k" + std::to_string(k), dom});
  std::vector<Distribution> rows(16, Distribution::point(0));
  const Family f(names, 0, params, rows);
  // 16^17 = 2^68 members.
  CHECK_THROWS_AS(Subfamily(f).member_count(), ResourceLimit);
  params.resize(15);
  const Family g(names, 0, params, rows);
  CHECK(Subfamily(g).member_count() == MemberCount{1} << 60);
}

TEST_CASE("subfamily validation keeps declared value order") {
  const Family f = toy4();
  const Subfamily s(f, {{2, 1}, {4, 3}, {3}, {4}});
  CHECK(std::vector<StateIndex>(s.domain(0).begin(), s.domain(0).end()) == std::vector<StateIndex>{1, 2});
  CHECK_THROWS_AS(Subfamily(f, {{}, {3}, {3}, {4}}), InvalidArgument);
  CHECK_THROWS_AS(Subfamily(f, {{0}, {3}, {3}, {4}}), InvalidArgument);
  CHECK_THROWS_AS(Subfamily(f, {{1}, {3}, {3}}), InvalidArgument);
  CHECK_THROWS_AS(s.restricted(f, 1, {}), InvalidArgument);
}

TEST_CASE("rank and least member not before") {
  const Family f = toy4();
  const Subfamily all(f);
  for (int i = 0; i < 4; ++i) CHECK(all.rank(toy4_member(i)) == static_cast<MemberCount>(i));
  const Subfamily right = all.restricted(f, 1, {4});
  CHECK(right.least_member_not_before(f, toy4_member(0)) == toy4_member(1));
  CHECK(right.least_member_not_before(f, toy4_member(2)) == toy4_member(3));
  const Subfamily left = all.restricted(f, 0, {1});
  CHECK_FALSE(left.least_member_not_before(f, toy4_member(2)));
  CHECK_THROWS_AS(left.rank(toy4_member(3)), PreconditionError);
}

TEST_CASE("generalization examples") {
  const Family f = toy4();
  const Subfamily all(f);
  const std::vector<ParamIndex> x{0};
  CHECK(generalization(toy4_member(0), x, all) == std::vector<Realization>{toy4_member(0), toy4_member(1)});
  const std::vector<ParamIndex> every{0, 1, 2, 3};
  CHECK(generalization(toy4_member(2), every, all) == std::vector<Realization>{toy4_member(2)});
  CHECK(generalization(toy4_member(0), {}, all).size() == 4);
}

TEST_CASE("generalization contains the reference and shrinks with more parameters") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Family f = testing::random_family(seed);
    const Subfamily all(f);
    const auto members = testing::enumerate(all);
    testing::Random rng(seed);
    const Realization& r = members[rng.below(members.size())];
    std::vector<ParamIndex> big;
    for (ParamIndex k = 0; k < f.num_params(); ++k) if (rng.chance(0.5)) big.push_back(k);
    std::vector<ParamIndex> small;
    for (ParamIndex k : big) if (rng.chance(0.5)) small.push_back(k);
    const auto g_big = generalization(r, big, all);
    const auto g_small = generalization(r, small, all);
    CHECK(std::find(g_big.begin(), g_big.end(), r) != g_big.end());
    for (const Realization& m : g_big) {
      CHECK(std::find(g_small.begin(), g_small.end(), m) != g_small.end());
    }
    MemberCount expected = 1;
    for (ParamIndex k = 0; k < f.num_params(); ++k) {
      if (std::find(big.begin(), big.end(), k) == big.end()) expected *= all.domain(k).size();
    }
    CHECK(g_big.size() == expected);
  }
}

TEST_CASE("iterate unpruned examples") {
  const Family f = toy4();
  const Subfamily all(f);
  const auto scope = std::make_shared<const Subfamily>(all);
  const std::vector<Conflict> by_x{{{0}, toy4_member(0), scope}};
  CHECK(iterate_unpruned(all, by_x) == std::vector<Realization>{toy4_member(2), toy4_member(3)});
  CHECK(iterate_unpruned(all, {}) == testing::enumerate(all));
  const std::vector<Conflict> everything{{{}, toy4_member(1), scope}};
  CHECK(iterate_unpruned(all, everything).empty());
}

TEST_CASE("iterate unpruned equals brute-force set subtraction") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Family f = testing::random_family(seed);
    const Subfamily all(f);
    const auto members = testing::enumerate(all);
    const auto scope = std::make_shared<const Subfamily>(all);
    testing::Random rng(seed * 7 + 3);
    std::vector<Conflict> conflicts;
    const std::size_t count = rng.below(5);
    for (std::size_t i = 0; i < count; ++i) {
      Conflict c;
      c.reference = members[rng.below(members.size())];
      for (ParamIndex k = 0; k < f.num_params(); ++k) {
        if (f.is_multi_valued(k) && rng.chance(0.6)) c.relevant.push_back(k);
      }
      c.scope = scope;
      conflicts.push_back(std::move(c));
    }
    std::vector<Realization> expected;
    std::set<std::vector<StateIndex>> covered;
    for (const Conflict& c : conflicts) {
      for (const Realization& m : generalization(c.reference, c.relevant, all)) {
        covered.insert(std::vector<StateIndex>(m.values().begin(), m.values().end()));
      }
    }
    for (const Realization& m : members) {
      if (!covered.count(std::vector<StateIndex>(m.values().begin(), m.values().end()))) {
        expected.push_back(m);
      }
    }
    CHECK(iterate_unpruned(all, conflicts) == expected);

    UnprunedCursor cursor(all);
    std::size_t yielded = 0;
    while (cursor.next(conflicts)) ++yielded;
    CHECK(cursor.skipped() + yielded == members.size());
    CHECK(cursor.remaining() == 0);
  }
}

TEST_CASE("cursor resumes from a position") {
  const Family f = toy4();
  const Subfamily all(f);
  UnprunedCursor cursor(all, toy4_member(2));
  CHECK(cursor.remaining() == 2);
  CHECK(cursor.next({}) == toy4_member(2));
  CHECK(cursor.next({}) == toy4_member(3));
  CHECK_FALSE(cursor.next({}));
  CHECK(cursor.exhausted());
  CHECK_THROWS_AS(UnprunedCursor(all.restricted(f, 0, {1}), toy4_member(2)), PreconditionError);
}
