#include "carpetks/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "carpetks/version.hpp"

namespace carpetks::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json spec_to_json(const CarpetSpec& spec) {
  json s = json::array();
  for (const auto& d : spec.digits()) s.push_back(d);
  return json{{"D", spec.dim()}, {"a", spec.base()}, {"S", std::move(s)}};
}

std::shared_ptr<CarpetSpec> spec_from_json(const json& j) {
  if (!j.contains("D") || !j.contains("a") || !j.contains("S"))
    throw config_error("carpet spec JSON needs fields D, a, S");
  std::vector<std::vector<int>> digits;
  for (const auto& d : j.at("S")) digits.push_back(d.get<std::vector<int>>());
  return std::make_shared<CarpetSpec>(j.at("D").get<int>(), j.at("a").get<int>(),
                                      std::move(digits));
}

std::shared_ptr<CarpetSpec> load_spec(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw config_error("cannot parse spec file " + path + ": " + e.what());
  }
  return spec_from_json(j);
}

namespace {
json condition_json(const ConditionResult& c) {
  return json{{"pass", c.pass}, {"witness", c.witness}};
}
}  // namespace

json validation_to_json(const ValidationReport& report) {
  return json{{"valid", report.valid()},
              {"symmetry", condition_json(report.symmetry)},
              {"connectedness", condition_json(report.connectedness)},
              {"non_diagonality", condition_json(report.non_diagonality)},
              {"borders", condition_json(report.borders)}};
}

json graph_header_json(const LevelGraph& graph) {
  return json{{"n", graph.level()},
              {"vertex_count", graph.vertex_count()},
              {"edge_count", graph.edge_count()},
              {"max_degree", graph.max_degree()},
              {"connected", graph.connected()}};
}

std::string graph_edges_csv(const LevelGraph& graph) {
  std::ostringstream out;
  out << "u,v\n";
  for (const auto& [u, v] : graph.edges()) out << u << "," << v << "\n";
  return out.str();
}

json solve_report_json(double p, int n, const SolveResult& result) {
  return json{{"p", p},
              {"n", n},
              {"iterations", result.iterations},
              {"energy", result.energy},
              {"residual", result.residual},
              {"converged", result.converged}};
}

std::string capacity_csv(const RhoEstimate& est) {
  std::ostringstream out;
  out << "n,cap,ratio\n";
  for (std::size_t i = 0; i < est.levels.size(); ++i) {
    out << est.levels[i] << "," << format_double(est.capacities[i]) << ",";
    if (i + 1 < est.levels.size()) out << format_double(est.ratios[i]);
    out << "\n";
  }
  return out.str();
}

json rho_json(const RhoEstimate& est) {
  return json{{"p", est.p},
              {"levels", est.levels},
              {"capacities", est.capacities},
              {"ratios", est.ratios},
              {"rho_hat", est.rho_hat},
              {"rho_extrap", est.rho_extrap},
              {"beta_hat", est.beta_hat},
              {"supercritical", est.supercritical},
              {"note",
               "capacity-ratio surrogate for the submultiplicativity parameter rho_p; may "
               "differ from the true rho_p by a bounded factor"}};
}

json ahlfors_json(const AhlforsScan& scan) {
  json rows = json::array();
  for (const auto& row : scan.rows)
    rows.push_back(json{{"r", row.radius.value},
                        {"ratio_min", row.ratio_min},
                        {"ratio_max", row.ratio_max},
                        {"max_bracket_rel", row.max_bracket_rel}});
  return json{{"c_lower", scan.c_lower}, {"c_upper", scan.c_upper},
              {"seed", scan.seed},       {"samples", scan.samples},
              {"level", scan.level},     {"rows", std::move(rows)}};
}

std::string functional_csv(const std::string& quantity, double n_or_r,
                           const FunctionalEstimate& est, std::uint64_t seed,
                           const GeometryConstants& consts) {
  std::ostringstream out;
  out << "quantity,n_or_r,estimate,std_err,samples,seed,c,p,beta\n";
  out << quantity << "," << format_double(n_or_r) << "," << format_double(est.value) << ","
      << format_double(est.std_err) << "," << est.samples << "," << seed << ","
      << format_double(consts.c) << "," << format_double(consts.p) << ","
      << format_double(consts.beta) << "\n";
  return out.str();
}

json functional_json(const std::string& quantity, double n_or_r, const FunctionalEstimate& est,
                     std::uint64_t seed, const GeometryConstants& consts) {
  return json{{"quantity", quantity},
              {"n_or_r", n_or_r},
              {"estimate", est.value},
              {"std_err", est.std_err},
              {"raw", est.raw},
              {"raw_std_err", est.raw_std_err},
              {"samples", est.samples},
              {"acceptance", est.acceptance},
              {"seed", seed},
              {"c", consts.c},
              {"p", consts.p},
              {"alpha", consts.alpha},
              {"beta", consts.beta}};
}

json report_to_json(const InequalityReport& report) {
  return json{{"id", report.id},
              {"function", report.function},
              {"levels", report.levels},
              {"left", report.left},
              {"right", report.right},
              {"c_hat", report.c_hat},
              {"c_hat_doubled", report.c_hat_doubled},
              {"stability", report.stability},
              {"stable", report.stable},
              {"trivial", report.trivial},
              {"growth_flag", report.growth_flag},
              {"tail_fraction", report.tail_fraction},
              {"notes", report.notes},
              {"seed", report.seed},
              {"samples", report.samples}};
}

json bundle_to_json(const VerifyBundle& bundle) {
  json reports = json::array();
  for (const auto& r : bundle.reports) reports.push_back(report_to_json(r));
  json members = json::array();
  for (const auto& m : bundle.suite.members)
    members.push_back(json{{"name", m.f.name()},
                           {"role", role_name(m.role)},
                           {"provenance", m.provenance}});
  return json{{"spec", spec_to_json(*bundle.suite.spec)},
              {"rho", rho_json(bundle.suite.rho)},
              {"constants",
               json{{"c", bundle.suite.consts.c},
                    {"alpha", bundle.suite.consts.alpha},
                    {"beta", bundle.suite.consts.beta},
                    {"p", bundle.suite.consts.p},
                    {"k", bundle.suite.k.k},
                    {"tail_ratio", bundle.suite.k.tail_ratio}}},
              {"members", std::move(members)},
              {"reports", std::move(reports)},
              {"all_members_stable", bundle.all_members_stable},
              {"negative_control_flagged", bundle.negative_control_flagged}};
}

std::string bundle_index_csv(const VerifyBundle& bundle) {
  std::ostringstream out;
  out << "inequality,function,c_hat,stability,pass\n";
  for (const auto& r : bundle.reports)
    out << r.id << "," << r.function << "," << format_double(r.c_hat) << ","
        << format_double(r.stability) << "," << (r.stable ? 1 : 0) << "\n";
  return out.str();
}

std::string bundle_plot_csv(const VerifyBundle& bundle) {
  std::ostringstream out;
  out << "inequality,function,n,left,right\n";
  for (const auto& r : bundle.reports)
    for (std::size_t i = 0; i < r.levels.size(); ++i)
      out << r.id << "," << r.function << "," << r.levels[i] << "," << format_double(r.left[i])
          << "," << format_double(r.right[i]) << "\n";
  return out.str();
}

json artifact(json body, json config) {
  return json{{"version", kVersion}, {"config", std::move(config)}, {"body", std::move(body)}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw config_error("failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace carpetks::io
