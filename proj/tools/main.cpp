#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "carpetks/io.hpp"
#include "carpetks/version.hpp"

namespace fs = std::filesystem;
using carpetks::io::json;

namespace {

struct Common {
  std::string spec_path;
  std::string out_dir = ".";
  int threads = 1;
  std::uint64_t seed = 20240817;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  cmd->add_option("--spec", c.spec_path, "carpet spec JSON path")->required();
  cmd->add_option("--out", c.out_dir, "output directory (default .)");
  cmd->add_option("--threads", c.threads, "worker threads (default 1, fully reproducible)");
  if (with_seed) cmd->add_option("--seed", c.seed, "RNG seed (default 20240817)");
}

void write_artifact(const Common& c, const std::string& name, json body, json config) {
  fs::create_directories(c.out_dir);
  const std::string path = (fs::path(c.out_dir) / name).string();
  carpetks::io::write_text(path, carpetks::io::artifact(std::move(body), std::move(config)).dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
}

void write_file(const Common& c, const std::string& name, const std::string& text) {
  fs::create_directories(c.out_dir);
  const std::string path = (fs::path(c.out_dir) / name).string();
  carpetks::io::write_text(path, text);
  std::cout << "wrote " << path << "\n";
}

// The output directory is deliberately not embedded: artifacts depend only on
// the inputs of the computation and must be byte-identical wherever written.
json base_config(const Common& c, const std::string& command) {
  return json{{"command", command},
              {"spec", c.spec_path},
              {"threads", c.threads},
              {"seed", c.seed}};
}

json solver_config_json(const carpetks::SolverConfig& s) {
  return json{{"p", s.p},           {"tol", s.tol},
              {"grad_tol", s.grad_tol}, {"max_iter", s.max_iter},
              {"weight_floor", s.weight_floor}, {"delta_floor", s.delta_floor}};
}

int run_validate(const Common& c) {
  auto spec = carpetks::io::load_spec(c.spec_path);
  auto report = carpetks::validate_carpet(*spec);
  json body = carpetks::io::validation_to_json(report);
  body["spec"] = carpetks::io::spec_to_json(*spec);
  write_artifact(c, "validation.json", body, base_config(c, "validate"));
  if (!report.valid()) {
    std::cerr << "spec is not a valid GSC\n";
    return 1;
  }
  std::cout << "valid GSC(D=" << spec->dim() << ", a=" << spec->base()
            << ", |S|=" << spec->nstar() << ")\n";
  return 0;
}

int run_graph(const Common& c, int n) {
  auto spec = carpetks::io::load_spec(c.spec_path);
  auto graph = carpetks::build_level_graph(spec, n);
  json config = base_config(c, "graph");
  config["n"] = n;
  write_artifact(c, "graph.json", carpetks::io::graph_header_json(*graph), config);
  write_file(c, "edges.csv", carpetks::io::graph_edges_csv(*graph));
  std::cout << "n=" << n << " vertices=" << graph->vertex_count()
            << " edges=" << graph->edge_count() << " max_degree=" << graph->max_degree() << "\n";
  return 0;
}

int run_solve(const Common& c, int n, const carpetks::SolverConfig& scfg) {
  auto spec = carpetks::io::load_spec(c.spec_path);
  const auto t0 = std::chrono::steady_clock::now();
  auto cap = carpetks::p_capacity(spec, n, scfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json config = base_config(c, "solve");
  config["n"] = n;
  config["solver"] = solver_config_json(scfg);
  json body = carpetks::io::solve_report_json(scfg.p, n, cap.solve);
  body["capacity"] = cap.capacity;
  write_artifact(c, "solve.json", body, config);
  // Wall time stays on the console so the artifact is byte-reproducible.
  std::cout << "capacity=" << carpetks::io::format_double(cap.capacity)
            << " residual=" << carpetks::io::format_double(cap.solve.residual)
            << " wall_time=" << secs << "s\n";
  return 0;
}

int run_rho(const Common& c, const std::string& levels, const carpetks::SolverConfig& scfg) {
  int lo = 0, hi = 0;
  if (std::sscanf(levels.c_str(), "%d:%d", &lo, &hi) != 2)
    throw carpetks::config_error("--levels expects lo:hi");
  auto spec = carpetks::io::load_spec(c.spec_path);
  auto est = carpetks::estimate_rho_beta(spec, scfg.p, lo, hi, scfg);
  json config = base_config(c, "rho");
  config["levels"] = levels;
  config["solver"] = solver_config_json(scfg);
  write_artifact(c, "rho.json", carpetks::io::rho_json(est), config);
  write_file(c, "capacity.csv", carpetks::io::capacity_csv(est));
  std::cout << "rho_hat=" << carpetks::io::format_double(est.rho_hat)
            << " beta_hat=" << carpetks::io::format_double(est.beta_hat)
            << " supercritical=" << (est.supercritical ? "true" : "false") << "\n";
  return 0;
}

struct FunctionalOpts {
  std::string quantity = "A";  // A | annulus | ks | deficit | ahlfors
  int n = 2;
  double r = 0.0;
  double p = 2.0;
  double beta = 0.0;
  double delta = 0.0;        // ks only; default beta/p
  int harmonic_level = 5;    // test function: capacity minimizer at this level
  std::uint64_t samples = 200000;
  int bracket_level = 5;
  int scan_samples = 1000;
};

int run_functional(const Common& c, const FunctionalOpts& o) {
  auto spec = carpetks::io::load_spec(c.spec_path);
  json config = base_config(c, "functional");
  config["quantity"] = o.quantity;
  config["n"] = o.n;
  config["r"] = o.r;
  config["p"] = o.p;
  config["beta"] = o.beta;
  config["delta"] = o.delta;
  config["harmonic_level"] = o.harmonic_level;
  config["samples"] = o.samples;
  config["bracket_level"] = o.bracket_level;
  config["scan_samples"] = o.scan_samples;

  if (o.quantity == "ahlfors") {
    std::vector<carpetks::Radius> radii;
    for (int k = 1; k <= 4; ++k)
      radii.push_back(carpetks::Radius::rational(1, carpetks::ipow(spec->base(), k)));
    auto scan = carpetks::ahlfors_scan(*spec, o.scan_samples, radii, o.bracket_level, c.seed);
    write_artifact(c, "ahlfors.json", carpetks::io::ahlfors_json(scan), config);
    std::cout << "c_lower=" << carpetks::io::format_double(scan.c_lower)
              << " c_upper=" << carpetks::io::format_double(scan.c_upper) << "\n";
    return 0;
  }

  if (!(o.beta > spec->alpha()))
    throw carpetks::config_error("--beta must exceed alpha (run the rho command first)");
  auto consts = carpetks::GeometryConstants::make(*spec, o.p, o.beta);
  carpetks::SolverConfig scfg;
  scfg.p = o.p;
  auto cap = carpetks::p_capacity(spec, o.harmonic_level, scfg);
  auto f = carpetks::EvalFunction::from_cells(
      {cap.graph, cap.solve.minimizer.values},
      "harmonic_m" + std::to_string(o.harmonic_level));
  carpetks::MCConfig mc;
  mc.seed = c.seed;
  mc.samples = o.samples;
  mc.threads = c.threads;

  carpetks::FunctionalEstimate est;
  double n_or_r = o.n;
  if (o.quantity == "A") {
    est = carpetks::functional_A(*spec, f, o.n, consts, mc);
  } else if (o.quantity == "annulus") {
    est = carpetks::annulus_A(*spec, f, o.n, consts, mc);
  } else if (o.quantity == "ks") {
    const double r = o.r > 0.0 ? o.r : consts.c * std::pow(spec->base(), -o.n);
    const double delta = o.delta > 0.0 ? o.delta : o.beta / o.p;
    auto ks = carpetks::ks_E(*spec, f, r, o.p, delta, mc, o.bracket_level);
    est.value = ks.value;
    est.std_err = ks.std_err;
    est.samples = ks.samples;
    est.acceptance = ks.acceptance;
    n_or_r = r;
  } else if (o.quantity == "deficit") {
    auto coarse = carpetks::build_level_graph(spec, o.n);
    est.value = carpetks::poincare_deficit(cap.solve.minimizer, coarse, o.p, o.beta);
    est.samples = 0;
  } else {
    throw carpetks::config_error("unknown quantity " + o.quantity +
                                 " (expected A, annulus, ks, deficit, ahlfors)");
  }
  write_artifact(c, "functional.json",
                 carpetks::io::functional_json(o.quantity, n_or_r, est, c.seed, consts), config);
  write_file(c, "functional.csv",
             carpetks::io::functional_csv(o.quantity, n_or_r, est, c.seed, consts));
  std::cout << o.quantity << "=" << carpetks::io::format_double(est.value)
            << " std_err=" << carpetks::io::format_double(est.std_err) << "\n";
  return 0;
}

int run_verify(const Common& c, carpetks::VerifyConfig vcfg) {
  auto spec = carpetks::io::load_spec(c.spec_path);
  vcfg.seed = c.seed;
  vcfg.threads = c.threads;
  auto bundle = carpetks::run_suite(spec, vcfg);
  json config = base_config(c, "verify");
  config["p"] = vcfg.p;
  config["n_lo"] = vcfg.n_lo;
  config["n_hi"] = vcfg.n_hi;
  config["member_level"] = vcfg.member_level;
  config["rho_level_lo"] = vcfg.rho_level_lo;
  config["annuli_J"] = vcfg.annuli_J;
  config["quad_depth"] = vcfg.quad_depth;
  config["samples"] = vcfg.samples;
  config["stability_threshold"] = vcfg.stability_threshold;
  write_artifact(c, "bundle.json", carpetks::io::bundle_to_json(bundle), config);
  write_file(c, "index.csv", carpetks::io::bundle_index_csv(bundle));
  write_file(c, "plot.csv", carpetks::io::bundle_plot_csv(bundle));
  std::cout << "members_stable=" << (bundle.all_members_stable ? "true" : "false")
            << " negative_control_flagged="
            << (bundle.negative_control_flagged ? "true" : "false") << "\n";
  if (!bundle.all_members_stable) {
    std::cerr << "stability threshold not met for at least one suite member\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(carpetks::kVersion) +
               " - generalized Sierpinski carpet energies and functionals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", carpetks::kVersion);

  Common c;
  carpetks::SolverConfig scfg;
  int graph_n = 1, solve_n = 1;
  std::string levels = "3:5";
  FunctionalOpts fo;
  carpetks::VerifyConfig vcfg;

  auto* validate = app.add_subcommand("validate", "check the four GSC conditions");
  add_common(validate, c, false);

  auto* graph = app.add_subcommand("graph", "build the level-n approximation graph");
  add_common(graph, c, false);
  graph->add_option("--n", graph_n, "graph level")->required();

  auto* solve = app.add_subcommand("solve", "p-capacity solve at level n");
  add_common(solve, c, false);
  solve->add_option("--n", solve_n, "graph level")->required();
  solve->add_option("--p", scfg.p, "energy exponent (default 2)");
  solve->add_option("--grad-tol", scfg.grad_tol, "first-order residual tolerance");

  auto* rho = app.add_subcommand("rho", "estimate rho_p and beta_p from capacity ratios");
  add_common(rho, c, false);
  rho->add_option("--p", scfg.p, "energy exponent (default 2)");
  rho->add_option("--levels", levels, "level range lo:hi (default 3:5)");

  auto* functional = app.add_subcommand("functional", "evaluate a KS / grid functional");
  add_common(functional, c);
  functional->add_option("--quantity", fo.quantity, "A | annulus | ks | deficit | ahlfors");
  functional->add_option("--n", fo.n, "functional level");
  functional->add_option("--r", fo.r, "ks radius (default c*a^-n)");
  functional->add_option("--p", fo.p, "exponent");
  functional->add_option("--beta", fo.beta, "walk-dimension exponent beta_p");
  functional->add_option("--delta", fo.delta, "ks exponent delta (default beta/p)");
  functional->add_option("--harmonic-level", fo.harmonic_level, "test-function solve level");
  functional->add_option("--samples", fo.samples, "Monte Carlo pair samples");
  functional->add_option("--bracket-level", fo.bracket_level, "ball-mass bracketing level");
  functional->add_option("--scan-samples", fo.scan_samples, "ahlfors scan centers");

  auto* verify = app.add_subcommand("verify", "run the full inequality suite");
  add_common(verify, c);
  verify->add_option("--p", vcfg.p, "exponent (default 2)");
  verify->add_option("--n-lo", vcfg.n_lo, "lowest functional level");
  verify->add_option("--n-hi", vcfg.n_hi, "highest functional level");
  verify->add_option("--member-level", vcfg.member_level, "harmonic member depth");
  verify->add_option("--samples", vcfg.samples, "Monte Carlo pair samples per level");
  verify->add_option("--stability", vcfg.stability_threshold, "stability threshold (default 0.10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's exit codes: 0 for --help/--version, 1 for bad usage.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*validate) return run_validate(c);
    if (*graph) return run_graph(c, graph_n);
    if (*solve) return run_solve(c, solve_n, scfg);
    if (*rho) return run_rho(c, levels, scfg);
    if (*functional) return run_functional(c, fo);
    if (*verify) return run_verify(c, vcfg);
  } catch (const carpetks::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
