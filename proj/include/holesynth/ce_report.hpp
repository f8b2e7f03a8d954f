#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holesynth/family.hpp"
#include "holesynth/numerics.hpp"
#include "holesynth/synthesis.hpp"

namespace holesynth {

/// One counterexample: a violating member, the property it violates, and the conflict built for it.
struct CeRecord {
  Realization member;
  std::size_t property = 0;
  std::vector<ParamIndex> conflict;
  double ratio = 0.0;  // conflict size over the number of multi-valued parameters
  std::size_t model_checks = 0;
  double seconds = 0.0;
  std::optional<std::size_t> minimal_size;
};

struct CeReport {
  BoundsMode mode = BoundsMode::Family;
  std::size_t parameters = 0;  // multi-valued parameters
  MemberCount members = 0;
  MemberCount violators = 0;
  std::vector<CeRecord> records;
  double mean_ratio = 0.0;
  double mean_model_checks = 0.0;
  double mean_seconds = 0.0;
  std::optional<double> mean_minimal_ratio;
};

struct CeReportOptions {
  BoundsMode mode = BoundsMode::Family;
  bool minimal_oracle = false;
  SolverOptions solver;
  double eta = kDecisionTolerance;
  MemberCount member_cap = 1'000'000;
};

/// Builds a conflict for every (violating member, violated property) pair of the family, with
/// rerouting vectors from the full family's bounds or trivial ones. The objective, if any, is
/// ignored.
CeReport ce_quality_report(const Family& family, const Specification& spec,
                           const CeReportOptions& options = {});

std::string report_json(const Family& family, const CeReport& report);
std::string report_text(const Family& family, const CeReport& report);

}  // namespace holesynth
