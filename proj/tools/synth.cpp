// Feasibility and optimal synthesis on a sketch file.

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_common.hpp"
#include "holesynth/sketch.hpp"
#include "holesynth/synthesis.hpp"

using namespace holesynth;

namespace {

struct Certificate {
  bool certified = true;
  std::vector<double> values;
};

Certificate certify(const Family& family, const Specification& spec, const Realization& r) {
  Certificate out;
  const Mc mc = induce(family, r);
  for (const Property& p : spec.properties) {
    const double v = mc_reach_exact(mc, p.target)[family.initial()];
    out.values.push_back(v);
    out.certified = out.certified && evaluate(v, p, 0.0) == Verdict::Sat;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesize a member of a Markov chain family satisfying a specification"};
  std::string sketch_path;
  std::string spec_path;
  std::string method_name;
  std::string bounds_name = "family";
  std::string cost_name = "deterministic";
  bool exact = false;
  bool json = false;
  std::uint64_t seed = 0;
  app.add_option("--sketch", sketch_path, "sketch file (mc-family/1 JSON)")->required();
  app.add_option("--spec", spec_path, "specification file, one property per line")->required();
  app.add_option("--method", method_name, "onebyone | cegis | ar | hybrid")
      ->required()
      ->check(CLI::IsMember({"onebyone", "cegis", "ar", "hybrid"}));
  app.add_option("--bounds", bounds_name, "rerouting vectors for CEGIS: trivial | family")
      ->check(CLI::IsMember({"trivial", "family"}));
  app.add_flag("--exact", exact, "re-check the witness with the exact linear solver");
  app.add_option("--cost-units", cost_name, "deterministic | wallclock")
      ->check(CLI::IsMember({"deterministic", "wallclock"}));
  app.add_option("--seed", seed, "recorded in the output; the search itself is deterministic");
  app.add_flag("--json", json, "print the result as a JSON object");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }

  return cli::guarded("synth", [&] {
    const Family family = load_sketch(sketch_path);
    const Specification spec = load_specification(spec_path, family);
    const Method method = *parse_method(method_name);
    SynthesisOptions options;
    options.solver.tolerance = cli::tolerance_from_env();
    options.bounds = bounds_name == "trivial" ? BoundsMode::Trivial : BoundsMode::Family;
    options.cost_mode =
        cost_name == "wallclock" ? CostMode::WallClock : CostMode::Deterministic;

    const SynthesisResult result = spec.objective
                                       ? optimal_synthesize(family, spec, method, options)
                                       : synthesize(family, spec, method, options);
    std::optional<Certificate> cert;
    if (exact && result.realization) {
      cert = certify(family, spec, *result.realization);
    }

    nlohmann::ordered_json out;
    out["method"] = to_string(method);
    out["verdict"] = to_string(result.verdict);
    if (result.realization) {
      nlohmann::ordered_json r = nlohmann::ordered_json::object();
      for (ParamIndex k = 0; k < family.num_params(); ++k) {
        r[family.parameter(k).name] = family.state_name((*result.realization)[k]);
      }
      out["realization"] = std::move(r);
      out["property_values"] = result.property_values;
    } else {
      out["realization"] = nullptr;
    }
    if (result.objective_value) {
      out["objective_value"] = *result.objective_value;
    }
    if (cert) {
      out["certified"] = cert->certified;
      out["exact_values"] = cert->values;
    }
    const SynthesisStats& s = result.stats;
    out["iterations"] = {{"cegis", s.cegis_iterations}, {"ar", s.ar_iterations}};
    out["model_checks"] = s.model_checks;
    out["conflicts"] = s.conflicts;
    out["members"] = {{"pruned", s.pruned}, {"checked", s.checked}};
    if (method == Method::Hybrid) {
      out["rounds"] = s.rounds;
      out["delta"] = s.delta;
    }
    out["wall_seconds"] = s.wall_seconds;
    out["seed"] = seed;

    if (json) {
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "verdict: " << to_string(result.verdict) << "\n";
      if (result.realization) {
        std::cout << "realization: " << describe(family, *result.realization) << "\n";
        for (std::size_t j = 0; j < result.property_values.size(); ++j) {
          std::cout << "property " << j << ": " << result.property_values[j] << "\n";
        }
      }
      if (result.objective_value) {
        std::cout << "objective: " << *result.objective_value << "\n";
      }
      if (cert) {
        std::cout << "certified: " << (cert->certified ? "yes" : "no") << "\n";
      }
      std::cout << "iterations: cegis " << s.cegis_iterations << ", ar " << s.ar_iterations
                << "; model checks " << s.model_checks << "; time " << s.wall_seconds << " s\n";
    }
    return result.realization ? cli::kFound : cli::kInfeasible;
  });
}
