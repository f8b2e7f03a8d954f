#include <doctest.h>

#include <fstream>
#include <sstream>

#include "holesynth/benchmark.hpp"
#include "holesynth/ce_report.hpp"
#include "holesynth/sketch.hpp"
#include "test_support.hpp"

#ifndef HOLESYNTH_DATA_DIR
#define HOLESYNTH_DATA_DIR "data"
#endif

using namespace holesynth;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string toy4_text() { return read(std::string(HOLESYNTH_DATA_DIR) + "/toy4.json"); }

// Replaces the first occurrence of `from` in the toy4 document.
std::string toy4_with(const std::string& from, const std::string& to) {
  std::string text = toy4_text();
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::string error_of(const std::string& text) {
  try {
    parse_sketch(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("shipped toy4 document") {
  const Family f = parse_sketch(toy4_text());
  CHECK(f == testing::toy4());
  CHECK(f.num_states() == 5);
  CHECK(f.multi_valued_count() == 2);
  CHECK(f.parameter(0).name == "X");
  CHECK(f.parameter(1).name == "Y");
}

TEST_CASE("serialization round-trips") {
  const Family f = testing::toy4();
  const std::string text = serialize_sketch(f);
  const Family g = parse_sketch(text);
  CHECK(g == f);
  CHECK(serialize_sketch(g) == text);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Family r = testing::random_family(seed);
    CHECK(parse_sketch(serialize_sketch(r)) == r);
  }
}

TEST_CASE("sketch diagnostics") {
  const std::string sum = error_of(toy4_with("\"Y\": 0.2, \"T'\": 0.6", "\"Y\": 0.1, \"T'\": 0.6"));
  CHECK(contains(sum, "/transitions/s1"));
  CHECK(contains(sum, "'s1' sum to 0.9"));

  const std::string unknown = error_of(toy4_with("\"X\": [\"s1\", \"s2\"]", "\"X\": [\"s1\", \"s9\"]"));
  CHECK(contains(unknown, "/parameters/X/1"));
  CHECK(contains(unknown, "unknown state 's9'"));

  CHECK(contains(error_of(toy4_with("\"Y\": [\"t\", \"f\"]", "\"Y\": []")), "/parameters/Y: empty domain"));
  CHECK(contains(error_of(toy4_with("\"s2\", \"t\"", "\"s2\", \"s2\"")), "duplicate state name 's2'"));
  CHECK(contains(error_of(toy4_with("\"Y\": [\"t\", \"f\"]", "\"X\": [\"t\", \"f\"]")),
                 "/parameters/X: duplicate parameter name"));
  CHECK(contains(error_of(toy4_with("\"X\": 1.0", "\"Z\": 1.0")), "unknown parameter 'Z'"));
  CHECK(contains(error_of(toy4_with("\"f\": {\"F'\": 1.0}", "\"g\": {\"F'\": 1.0}")), "unknown state 'g'"));
  CHECK(contains(error_of(toy4_with(",\n    \"f\": {\"F'\": 1.0}", "")), "'f' has no template"));
  CHECK(contains(error_of(toy4_with("mc-family/1", "mc-family/2")), "/format"));
  CHECK(contains(error_of(toy4_with("\"initial\": \"s0\"", "\"initial\": \"zz\"")), "/initial"));
  CHECK(contains(error_of(toy4_with("\"X\": 1.0", "\"X\": 1.5")), "outside [0,1]"));
  CHECK(contains(error_of(toy4_with("\"X\": 1.0", "\"X\": \"one\"")), "must be a number"));

  // Syntax errors carry line:column.
  const std::string syntax = error_of(toy4_with("\"initial\": \"s0\",", "\"initial\": \"s0\""));
  CHECK(contains(syntax, "malformed JSON"));
  CHECK(syntax.rfind("5:", 0) == 0);
}

TEST_CASE("property expressions") {
  const Family f = testing::toy4();
  PropertyLine line = parse_property("P<=0.3 [F t]", f);
  const Property& p = std::get<Property>(line);
  CHECK(p.direction == Direction::AtMost);
  CHECK(p.threshold == 0.3);
  CHECK(p.target == StateSet{3});
  CHECK(p.is_safety());

  line = parse_property("  P >= 1.0 [ F t f ]  ", f);
  CHECK(std::get<Property>(line).direction == Direction::AtLeast);
  CHECK(std::get<Property>(line).threshold == 1.0);
  CHECK(std::get<Property>(line).target == StateSet{3, 4});

  line = parse_property("min P [F t] eps=0.05", f);
  const Objective& o = std::get<Objective>(line);
  CHECK(o.direction == Optimize::Minimize);
  CHECK(o.epsilon == 0.05);
  CHECK(std::get<Objective>(parse_property("max P [F f]", f)).epsilon == 0.0);
}

TEST_CASE("property expression errors") {
  const Family f = testing::toy4();
  auto message = [&](const char* text) {
    try {
      parse_property(text, f);
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(contains(message("P<=abc [F t]"), "malformed threshold"));
  CHECK(contains(message("P<=1.5 [F t]"), "malformed threshold"));
  CHECK(contains(message("P<= [F t]"), "malformed threshold"));
  CHECK(contains(message("P<=0.3 [F zz]"), "unknown target state 'zz'"));
  CHECK(contains(message("P<=0.3 [F ]"), "empty target list"));
  CHECK(contains(message("P<0.3 [F t]"), "expected '<=' or '>='"));
  CHECK(contains(message("P<=0.3 [F t] eps=0.1"), "only allowed"));
  CHECK(contains(message("min P [F t] eps=1"), "epsilon"));
  CHECK(contains(message("P<=0.3 [F t] extra"), "trailing"));
  CHECK(contains(message("Q<=0.3 [F t]"), "expected"));
}

TEST_CASE("specification files") {
  const Family f = testing::toy4();
  const Specification spec =
      parse_specification("# comment\n\nP<=0.3 [F t]\r\nP>=0.1 [F f]\nmin P [F t]\n", f);
  CHECK(spec.properties.size() == 2);
  CHECK(spec.objective.has_value());
  CHECK_THROWS_AS(parse_specification("min P [F t]\nmax P [F t]\n", f), ParseError);
  CHECK_THROWS_AS(parse_specification("# nothing\n", f), ParseError);
  try {
    parse_specification("P<=0.3 [F t]\nP<=x [F t]\n", f);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.location() == "line 2");
  }
  const Specification shipped =
      load_specification(std::string(HOLESYNTH_DATA_DIR) + "/toy4_safety.spec", f);
  REQUIRE(shipped.properties.size() == 1);
  CHECK(shipped.properties[0].threshold == 0.3);
}

TEST_CASE("benchmark generator is deterministic and valid") {
  const BenchmarkConfig config{10, 3, 2, 7};
  const std::string a = serialize_sketch(generate_benchmark(config));
  const std::string b = serialize_sketch(generate_benchmark(config));
  CHECK(a == b);
  CHECK(a != serialize_sketch(generate_benchmark({10, 3, 2, 8})));
  CHECK(parse_sketch(a) == generate_benchmark(config));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    testing::Random rng(seed);
    const std::size_t states = 3 + rng.below(20);
    const std::size_t params = 1 + rng.below(std::min<std::size_t>(6, 3 * (states - 2)));
    const std::size_t domain = 2 + rng.below(std::min<std::size_t>(3, states - 1));
    const Family f = generate_benchmark({states, params, domain, seed});
    CAPTURE(seed);
    CHECK(f.num_states() == states);
    CHECK(f.num_params() == params + 2);
    CHECK(parse_sketch(serialize_sketch(f)) == f);
    for (ParamIndex k = 0; k < params; ++k) CHECK(f.parameter(k).domain.size() == domain);
    std::vector<int> uses(params, 0);
    for (StateIndex s = 0; s + 2 < states; ++s) {
      std::size_t holes = 0;
      for (ParamIndex k : f.support(s)) {
        if (k < params) {
          ++holes;
          ++uses[k];
        }
      }
      CHECK(holes >= 1);
      CHECK(holes <= 3);
    }
    for (int u : uses) CHECK(u >= 1);
    const Subfamily all(f);
    if (all.member_count() <= 512) {
      for (const Realization& r : testing::enumerate(all)) {
        const Mc mc = induce(f, r);
        for (StateIndex s = 0; s < mc.num_states(); ++s) CHECK(std::abs(mc.row(s).total() - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("benchmark generator rejects infeasible budgets") {
  CHECK_THROWS_AS(generate_benchmark({4, 7, 2, 0}), InvalidArgument);
  CHECK_NOTHROW(generate_benchmark({4, 6, 2, 0}));
  CHECK_THROWS_AS(generate_benchmark({2, 1, 2, 0}), InvalidArgument);
  CHECK_THROWS_AS(generate_benchmark({5, 0, 2, 0}), InvalidArgument);
  CHECK_THROWS_AS(generate_benchmark({5, 1, 1, 0}), InvalidArgument);
  CHECK_THROWS_AS(generate_benchmark({5, 1, 6, 0}), InvalidArgument);
}

TEST_CASE("CE quality report on toy4") {
  const Family f = testing::toy4();
  const Specification spec{{make_property(Direction::AtMost, 0.3, {3})}, std::nullopt};
  CeReportOptions options;
  options.minimal_oracle = true;
  const CeReport fam = ce_quality_report(f, spec, options);
  CHECK(fam.parameters == 2);
  CHECK(fam.violators == 3);
  REQUIRE(fam.records.size() == 3);
  CHECK(fam.records[0].member == testing::toy4_member(0));
  CHECK(fam.records[0].conflict == std::vector<ParamIndex>{0});
  CHECK(fam.records[0].ratio == 0.5);
  CHECK(fam.records[0].model_checks == 2);
  CHECK(*fam.records[0].minimal_size == 1);

  options.mode = BoundsMode::Trivial;
  const CeReport triv = ce_quality_report(f, spec, options);
  CHECK(triv.records[0].ratio == 1.0);
  CHECK(triv.mean_ratio >= fam.mean_ratio);
  for (const CeRecord& rec : fam.records) {
    CHECK(rec.ratio >= 0.0);
    CHECK(rec.ratio <= 1.0);
    CHECK(rec.model_checks <= f.multi_valued_count() + 1);
  }

  const std::string json = report_json(f, fam);
  CHECK(contains(json, "\"mean_ratio\""));
  CHECK(contains(json, "\"conflict\": [\n        \"X\"\n      ]"));
  CHECK(contains(report_text(f, triv), "trivial bounds"));
}

TEST_CASE("CE quality report without violators is empty") {
  const Family f = testing::toy4();
  const Specification spec{{make_property(Direction::AtMost, 0.9, {3})}, std::nullopt};
  const CeReport report = ce_quality_report(f, spec);
  CHECK(report.records.empty());
  CHECK(report.violators == 0);
  CHECK(report.mean_ratio == 0.0);
}
