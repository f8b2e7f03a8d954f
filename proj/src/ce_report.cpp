#include "holesynth/ce_report.hpp"

#include <chrono>
#include <sstream>

#include <json.hpp>

#include "holesynth/abstraction.hpp"
#include "holesynth/counterexample.hpp"
#include "holesynth/errors.hpp"

namespace holesynth {

CeReport ce_quality_report(const Family& family, const Specification& spec,
                           const CeReportOptions& options) {
  validate_specification(spec, family.num_states());
  const Subfamily all(family);
  CeReport report;
  report.mode = options.mode;
  report.parameters = family.multi_valued_count();
  report.members = all.member_count();
  if (report.members > options.member_cap) {
    throw ResourceLimit("family has " + std::to_string(report.members) +
                        " members, above the report cap of " + std::to_string(options.member_cap));
  }

  std::vector<std::vector<double>> gammas;
  for (const Property& p : spec.properties) {
    if (options.mode == BoundsMode::Family) {
      const BoundsVec b = compute_bounds(build_quotient(family, all), p.target, options.solver);
      gammas.push_back(p.is_safety() ? b.lb : b.ub);
    } else {
      gammas.push_back(trivial_gamma(p, family.num_states()));
    }
  }

  double minimal_total = 0.0;
  for (const Realization& r : iterate_unpruned(all, {})) {
    const Mc mc = induce(family, r);
    bool violator = false;
    for (std::size_t j = 0; j < spec.properties.size(); ++j) {
      const Property& p = spec.properties[j];
      const double v = mc_reach(mc, p.target, options.solver)[family.initial()];
      if (evaluate(v, p, options.eta) == Verdict::Sat) {
        continue;
      }
      violator = true;
      const auto start = std::chrono::steady_clock::now();
      ConflictResult ce =
          construct_conflict(mc, family, r, p, gammas[j], all, options.solver, options.eta);
      CeRecord rec;
      rec.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.member = r;
      rec.property = j;
      rec.conflict = std::move(ce.conflict.relevant);
      rec.model_checks = ce.model_checks;
      rec.ratio = report.parameters == 0
                      ? 0.0
                      : static_cast<double>(rec.conflict.size()) /
                            static_cast<double>(report.parameters);
      if (options.minimal_oracle) {
        rec.minimal_size =
            minimal_conflict(family, r, p, all, options.solver, options.eta).relevant.size();
        minimal_total += report.parameters == 0 ? 0.0
                                                : static_cast<double>(*rec.minimal_size) /
                                                      static_cast<double>(report.parameters);
      }
      report.records.push_back(std::move(rec));
    }
    if (violator) {
      ++report.violators;
    }
  }

  if (!report.records.empty()) {
    const auto n = static_cast<double>(report.records.size());
    for (const CeRecord& rec : report.records) {
      report.mean_ratio += rec.ratio / n;
      report.mean_model_checks += static_cast<double>(rec.model_checks) / n;
      report.mean_seconds += rec.seconds / n;
    }
    if (options.minimal_oracle) {
      report.mean_minimal_ratio = minimal_total / n;
    }
  }
  return report;
}

namespace {

std::string names_of(const Family& family, const std::vector<ParamIndex>& params) {
  std::string out = "{";
  for (std::size_t i = 0; i < params.size(); ++i) {
    out += (i ? ", " : "") + family.parameter(params[i]).name;
  }
  return out + "}";
}

}  // namespace

std::string report_json(const Family& family, const CeReport& report) {
  using Json = nlohmann::ordered_json;
  Json out;
  out["mode"] = report.mode == BoundsMode::Family ? "family" : "trivial";
  out["parameters"] = report.parameters;
  out["members"] = report.members;
  out["violators"] = report.violators;
  out["counterexamples"] = report.records.size();
  out["mean_ratio"] = report.mean_ratio;
  out["mean_model_checks"] = report.mean_model_checks;
  out["mean_seconds"] = report.mean_seconds;
  if (report.mean_minimal_ratio) {
    out["mean_minimal_ratio"] = *report.mean_minimal_ratio;
  }
  Json records = Json::array();
  for (const CeRecord& rec : report.records) {
    Json r;
    r["member"] = describe(family, rec.member);
    r["property"] = rec.property;
    Json conflict = Json::array();
    for (ParamIndex k : rec.conflict) {
      conflict.push_back(family.parameter(k).name);
    }
    r["conflict"] = std::move(conflict);
    r["ratio"] = rec.ratio;
    r["model_checks"] = rec.model_checks;
    if (rec.minimal_size) {
      r["minimal_size"] = *rec.minimal_size;
    }
    records.push_back(std::move(r));
  }
  out["records"] = std::move(records);
  return out.dump(2) + "\n";
}

std::string report_text(const Family& family, const CeReport& report) {
  std::ostringstream out;
  out << "CE quality (" << (report.mode == BoundsMode::Family ? "family bounds" : "trivial bounds")
      << "): " << report.records.size() << " counterexamples from " << report.violators << " of "
      << report.members << " members, " << report.parameters << " multi-valued parameters\n";
  for (const CeRecord& rec : report.records) {
    out << "  " << describe(family, rec.member) << " property " << rec.property << ": conflict "
        << names_of(family, rec.conflict) << " ratio " << rec.ratio << " checks "
        << rec.model_checks;
    if (rec.minimal_size) {
      out << " minimal " << *rec.minimal_size;
    }
    out << "\n";
  }
  out << "mean ratio " << report.mean_ratio << ", mean model checks " << report.mean_model_checks
      << ", mean time " << report.mean_seconds << " s";
  if (report.mean_minimal_ratio) {
    out << ", mean minimal ratio " << *report.mean_minimal_ratio;
  }
  out << "\n";
  return out.str();
}

}  // namespace holesynth
