// Random benchmark families.

#include <fstream>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "holesynth/benchmark.hpp"
#include "holesynth/sketch.hpp"

using namespace holesynth;

int main(int argc, char** argv) {
  CLI::App app{"Benchmark family generator"};
  app.require_subcommand(1);
  BenchmarkConfig config;
  std::string output = "-";
  CLI::App* gen = app.add_subcommand("gen", "write a random family as a sketch document");
  gen->add_option("--states", config.states, "state count including goal and sink")->required();
  gen->add_option("--params", config.params, "number of holes")->required();
  gen->add_option("--domain", config.domain, "values per hole")->required();
  gen->add_option("--seed", config.seed, "random seed")->required();
  gen->add_option("-o,--output", output, "output file, '-' for stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }

  return cli::guarded("bench", [&] {
    const std::string text = serialize_sketch(generate_benchmark(config));
    if (output == "-") {
      std::cout << text;
      return 0;
    }
    std::ofstream out(output, std::ios::binary);
    if (!(out << text)) {
      throw InvalidArgument("cannot write '" + output + "'");
    }
    return 0;
  });
}
