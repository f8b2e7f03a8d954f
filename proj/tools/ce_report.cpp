// Counterexample quality over every violating member of a family.

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "holesynth/ce_report.hpp"
#include "holesynth/sketch.hpp"

using namespace holesynth;

int main(int argc, char** argv) {
  CLI::App app{"Conflict size statistics for trivial or family-bound rerouting"};
  std::string sketch_path;
  std::string spec_path;
  std::string mode = "family";
  bool minimal = false;
  bool json = false;
  app.add_option("--sketch", sketch_path, "sketch file (mc-family/1 JSON)")->required();
  app.add_option("--spec", spec_path, "specification file")->required();
  app.add_option("--mode", mode, "trivial | family")
      ->required()
      ->check(CLI::IsMember({"trivial", "family"}));
  app.add_flag("--minimal-oracle", minimal, "also compute minimum-size conflicts by enumeration");
  app.add_flag("--json", json, "machine-readable output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }

  return cli::guarded("ce-report", [&] {
    const Family family = load_sketch(sketch_path);
    const Specification spec = load_specification(spec_path, family);
    CeReportOptions options;
    options.mode = mode == "trivial" ? BoundsMode::Trivial : BoundsMode::Family;
    options.minimal_oracle = minimal;
    options.solver.tolerance = cli::tolerance_from_env();
    const CeReport report = ce_quality_report(family, spec, options);
    std::cout << (json ? report_json(family, report) : report_text(family, report));
    return 0;
  });
}
