#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "carpetks/measure.hpp"
#include "carpetks/spec.hpp"
#include "carpetks/verify.hpp"

namespace carpetks::io {

using nlohmann::json;

/// Full-precision decimal rendering (%.17g): round-trips any double.
std::string format_double(double v);

json spec_to_json(const CarpetSpec& spec);
std::shared_ptr<CarpetSpec> spec_from_json(const json& j);
std::shared_ptr<CarpetSpec> load_spec(const std::string& path);

json validation_to_json(const ValidationReport& report);

json graph_header_json(const LevelGraph& graph);
std::string graph_edges_csv(const LevelGraph& graph);

/// Solve report. Wall time is deliberately not part of the artifact so that
/// reruns with the same config are byte-identical; timings go to the console.
json solve_report_json(double p, int n, const SolveResult& result);

std::string capacity_csv(const RhoEstimate& est);
json rho_json(const RhoEstimate& est);

json ahlfors_json(const AhlforsScan& scan);

std::string functional_csv(const std::string& quantity, double n_or_r,
                           const FunctionalEstimate& est, std::uint64_t seed,
                           const GeometryConstants& consts);
json functional_json(const std::string& quantity, double n_or_r, const FunctionalEstimate& est,
                     std::uint64_t seed, const GeometryConstants& consts);

json report_to_json(const InequalityReport& report);
json bundle_to_json(const VerifyBundle& bundle);
std::string bundle_index_csv(const VerifyBundle& bundle);
std::string bundle_plot_csv(const VerifyBundle& bundle);

/// Wraps an artifact body with the tool version and the full run config, so
/// every output is replayable from its own contents.
json artifact(json body, json config);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace carpetks::io
