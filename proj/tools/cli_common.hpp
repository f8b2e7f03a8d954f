#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

#include "holesynth/errors.hpp"
#include "holesynth/numerics.hpp"

namespace holesynth::cli {

enum ExitCode : int { kFound = 0, kInfeasible = 1, kInputError = 2, kResourceCap = 3 };

/// Value-iteration tolerance: SYNTH_TOL if set, the library default otherwise.
inline double tolerance_from_env() {
  const char* raw = std::getenv("SYNTH_TOL");
  if (raw == nullptr || *raw == '\0') {
    return kDefaultTolerance;
  }
  char* end = nullptr;
  const double tol = std::strtod(raw, &end);
  if (*end != '\0' || !(tol > 0.0) || tol >= 1.0) {
    throw InvalidArgument(std::string("SYNTH_TOL must be a number in (0,1), got '") + raw + "'");
  }
  return tol;
}

/// Runs `body`, mapping library errors onto exit codes.
template <typename Body>
int guarded(const char* tool, Body&& body) {
  try {
    return body();
  } catch (const ResourceLimit& e) {
    std::cerr << tool << ": resource limit: " << e.what() << "\n";
    return kResourceCap;
  } catch (const std::exception& e) {
    std::cerr << tool << ": error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace holesynth::cli
