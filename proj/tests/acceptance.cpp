// Acceptance checks: one pass/fail line per criterion. argv[1] must be the
// path to the command-line binary (used by the reproducibility check).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "carpetks/io.hpp"
#include "carpetks/verify.hpp"
#include "naive_oracle.hpp"

using namespace carpetks;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::shared_ptr<const CarpetSpec> sc() {
  static auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  return spec;
}

// --- 1: optimized validator vs definition oracle on every 3x3 digit set ----
void criterion_validation(Check& c) {
  for (unsigned mask = 1; mask < 512; ++mask) {
    std::vector<std::vector<int>> digits;
    naive::DigitSet s;
    for (int b = 0; b < 9; ++b)
      if (mask & (1u << b)) {
        digits.push_back({b / 3, b % 3});
        s.insert({b / 3, b % 3});
      }
    bool lib_valid = false;
    try {
      CarpetSpec spec(2, 3, digits);
      lib_valid = validate_carpet(spec).valid();
    } catch (const Error&) {
      lib_valid = false;
    }
    c.require(lib_valid == naive::valid(s, 2, 3),
              "validator disagrees with the oracle at mask " + std::to_string(mask));
  }
}

// --- 2: graph edges vs brute-force pair oracle ------------------------------
void criterion_graphs(Check& c) {
  auto edge_set = [](const LevelGraph& g) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> out;
    for (auto [u, v] : g.edges()) out.insert({std::min(u, v), std::max(u, v)});
    return out;
  };
  auto brute = [](const LevelGraph& g) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> out;
    const auto n = static_cast<std::uint32_t>(g.vertex_count());
    for (std::uint32_t u = 0; u < n; ++u) {
      auto lu = g.lattice_of(u);
      for (std::uint32_t v = u + 1; v < n; ++v) {
        auto lv = g.lattice_of(v);
        std::int64_t cheb = 0;
        for (std::size_t k = 0; k < lu.size(); ++k)
          cheb = std::max(cheb, std::abs(lu[k] - lv[k]));
        if (cheb <= 1) out.insert({u, v});
      }
    }
    return out;
  };

  auto g1 = build_level_graph(sc(), 1);
  c.require(g1->vertex_count() == 8 && g1->edge_count() == 12, "level-1 carpet is not 8/12");
  for (int n = 1; n <= 3; ++n) {
    auto g = build_level_graph(sc(), n);
    c.require(edge_set(*g) == brute(*g), "carpet edge mismatch at level " + std::to_string(n));
    c.require(g->max_degree() <= 8, "carpet degree exceeds 3^D - 1");
  }
  auto ms = std::make_shared<CarpetSpec>(CarpetSpec::menger_sponge());
  for (int n = 1; n <= 2; ++n) {
    auto g = build_level_graph(ms, n);
    c.require(edge_set(*g) == brute(*g), "sponge edge mismatch at level " + std::to_string(n));
    c.require(g->max_degree() <= 26, "sponge degree exceeds 3^D - 1");
  }
}

// --- 3: solver vs linear oracle, residuals, maximum principle ---------------
void criterion_solver(Check& c) {
  SolverConfig cfg;
  auto cap = p_capacity(sc(), 1, cfg);
  c.require(std::abs(cap.capacity - 2.0) <= 1e-10, "level-1 capacity is not 2 to 1e-10");
  for (double p : {1.5, 3.0, 4.0}) {
    SolverConfig pc;
    pc.p = p;
    for (int n = 1; n <= 3; ++n) {
      auto res = p_capacity(sc(), n, pc);
      c.require(res.solve.residual <= 1e-8,
                "residual above 1e-8 at p=" + std::to_string(p) + " n=" + std::to_string(n));
      for (double v : res.solve.minimizer.values)
        c.require(v >= -1e-12 && v <= 1.0 + 1e-12, "maximum principle violated");
    }
  }
}

// --- 4: capacity-ratio estimates of rho and beta ----------------------------
RhoEstimate g_rho;  // reused by later criteria

void criterion_rho(Check& c) {
  SolverConfig cfg;
  g_rho = estimate_rho_beta(sc(), 2.0, 3, 5, cfg);
  c.require(g_rho.ratios.size() == 2, "expected two capacity ratios for levels 3..5");
  for (std::size_t i = 0; i + 1 < g_rho.ratios.size(); ++i)
    c.require(std::abs(g_rho.ratios[i] - g_rho.ratios[i + 1]) <= 0.02,
              "consecutive capacity ratios differ by more than 0.02");
  c.require(g_rho.rho_hat >= 1.20 && g_rho.rho_hat <= 1.31, "rho_hat outside [1.20, 1.31]");
  c.require(g_rho.beta_hat >= 2.02 && g_rho.beta_hat <= 2.15, "beta_hat outside [2.02, 2.15]");
  c.require(g_rho.beta_hat > sc()->alpha(), "beta_hat does not exceed alpha");
  c.require(g_rho.supercritical, "supercritical flag not set");
}

// --- 5: smallest splitting depth k ------------------------------------------
void criterion_min_k(Check& c) {
  const double alpha = sc()->alpha();
  const double gap = g_rho.beta_hat - alpha;
  c.require(gap >= 0.13 && gap <= 0.26, "estimated beta - alpha outside [0.13, 0.26]");
  auto k2 = min_k(2.0, 3, alpha, g_rho.beta_hat);
  c.require(k2.k == 4, "k at p=2 is not 4");
  c.require(k2.tail_ratio > 0.0 && k2.tail_ratio < 1.0, "tail ratio outside (0,1)");
  auto k1 = min_k(1.0, 3, alpha, g_rho.beta_hat);
  c.require(k1.k == 1, "k at p=1 is not 1");
}

// --- 6: shared-sample functional identities ---------------------------------
EvalFunction harmonic_member(int level) {
  SolverConfig cfg;
  auto cap = p_capacity(sc(), level, cfg);
  return EvalFunction::from_cells({cap.graph, cap.solve.minimizer.values},
                                  "harmonic_m" + std::to_string(level));
}

void criterion_identities(Check& c) {
  auto consts = GeometryConstants::make(*sc(), 2.0, g_rho.beta_hat);
  MCConfig mc;
  mc.samples = 1000000;
  auto f = harmonic_member(6);
  auto g = EvalFunction::coordinate(2);
  auto est = functional_A_multi(*sc(), {f, f.scaled(2.0), f.shifted(3.0), g, f.plus(g)}, 2,
                                consts, mc);
  c.require(est[1].raw == 4.0 * est[0].raw, "2-homogeneity not exact");
  c.require(est[2].raw == est[0].raw, "constant invariance not exact");
  c.require(std::sqrt(est[4].raw) <= std::sqrt(est[0].raw) + std::sqrt(est[3].raw) + 1e-12,
            "Minkowski inequality violated on shared samples");

  auto dec = ball_annuli(*sc(), f, 2, 5, consts, mc);
  double sum = 0.0;
  for (const auto& a : dec.annuli) sum += a.raw;
  c.require(std::abs(dec.ball.raw - (sum + dec.tail.raw)) <= 1e-12 * dec.ball.raw,
            "sample-wise partition identity violated");
  // Truncated series + measured geometric tail recovers the ball to 2%.
  c.require(sum >= 0.98 * dec.ball.raw, "annulus truncation tail exceeds 2%");
}

// --- 7: inequality harness stability + negative control ---------------------
void criterion_harness(Check& c) {
  VerifyConfig cfg;
  cfg.n_lo = 2;
  cfg.n_hi = 5;
  cfg.member_level = 7;
  cfg.rho_level_lo = 3;
  cfg.samples = 60000;
  auto bundle = run_suite(sc(), cfg);
  c.require(bundle.all_members_stable, "some empirical constant moved >= 10% under doubled effort");
  c.require(bundle.negative_control_flagged,
            "negative control not flagged for ball-functional growth");
  for (const auto& r : bundle.reports) {
    if (r.trivial) continue;
    c.require(std::isfinite(r.c_hat) && r.c_hat > 0.0,
              "non-finite empirical constant in " + r.id + " / " + r.function);
  }
}

// --- 8: volume-regularity scan and the KS / ball-functional sandwich --------
void criterion_ahlfors(Check& c) {
  std::vector<Radius> radii;
  for (int k = 1; k <= 4; ++k) radii.push_back(Radius::rational(1, ipow(3, k)));
  auto scan = ahlfors_scan(*sc(), 1000, radii, 6, 20240817);
  auto scan2 = ahlfors_scan(*sc(), 2000, radii, 6, 20240818);
  c.require(scan.c_lower > 0.0 && std::isfinite(scan.c_upper), "scan constants not finite");
  const double ratio1 = scan.c_upper / scan.c_lower;
  const double ratio2 = scan2.c_upper / scan2.c_lower;
  c.require(std::abs(ratio1 - ratio2) <= 0.20 * ratio1,
            "scan constant ratio moved more than 20% under doubled sampling");

  auto f = harmonic_member(6);
  auto consts = GeometryConstants::make(*sc(), 2.0, g_rho.beta_hat);
  const double expo = consts.alpha + consts.beta;
  MCConfig mc;
  mc.samples = 400000;
  for (int n = 2; n <= 3; ++n) {
    auto a = functional_A(*sc(), f, n, consts, mc);
    const double r = consts.c * std::pow(3.0, -n);
    auto ks = ks_E(*sc(), f, r, 2.0, consts.beta / 2.0, mc, n + 4);
    // A^(n) = a^{expo n} I and ks = r^{-expo} I / mu(B), so their ratio is
    // pinched between the scan constants times c^{-expo}.
    const double lo = 1.0 / (scan.c_upper * std::pow(consts.c, expo));
    const double hi = 1.0 / (scan.c_lower * std::pow(consts.c, expo));
    const double ratio = ks.value / a.value;
    const double slack = 3.0 * (ks.std_err / a.value + a.std_err * ks.value / (a.value * a.value));
    c.require(ratio >= lo * (1.0 - ks.avg_mass_rel_halfwidth) - slack,
              "ks/A below the scan band at n=" + std::to_string(n));
    c.require(ratio <= hi * (1.0 + ks.avg_mass_rel_halfwidth) + slack,
              "ks/A above the scan band at n=" + std::to_string(n));
  }
}

// --- 9: byte-identical CLI artifacts ----------------------------------------
std::string g_cli;

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return io::read_text(a.string()) == io::read_text(b.string());
}

void criterion_reproducibility(Check& c) {
  const fs::path root = fs::temp_directory_path() / "carpetks_accept";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string spec_path = (root / "spec.json").string();
  io::write_text(spec_path, io::spec_to_json(*sc()).dump(2) + "\n");

  struct Job {
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Job> jobs{
      {"validate --spec " + spec_path, {"validation.json"}},
      {"graph --spec " + spec_path + " --n 2", {"graph.json", "edges.csv"}},
      {"rho --spec " + spec_path + " --levels 2:4", {"rho.json", "capacity.csv"}},
      {"functional --spec " + spec_path +
           " --quantity A --n 2 --beta 2.09 --harmonic-level 5 --samples 50000",
       {"functional.json", "functional.csv"}},
  };
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const fs::path d1 = root / ("run_a_" + std::to_string(j));
    const fs::path d2 = root / ("run_b_" + std::to_string(j));
    for (const auto& d : {d1, d2}) {
      const int rc = run_cli(jobs[j].args + " --out " + d.string());
      c.require(rc == 0, "command failed: " + jobs[j].args);
    }
    if (!c.ok) return;
    for (const auto& f : jobs[j].files)
      c.require(same_bytes(d1 / f, d2 / f), "artifact " + f + " differs between identical runs");
  }
}

int run_criterion(int idx, const std::string& label, void (*fn)(Check&), double limit_s) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs > limit_s) {
    c.ok = false;
    if (c.detail.empty()) c.detail = "runtime limit exceeded";
  }
  std::printf("criterion %d (%s): %s (%.1f s)%s%s\n", idx, label.c_str(),
              c.ok ? "PASS" : "FAIL", secs, c.detail.empty() ? "" : " - ",
              c.detail.c_str());
  std::fflush(stdout);
  return c.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
    return 2;
  }
  g_cli = argv[1];

  int failures = 0;
  failures += run_criterion(1, "validator matches definition oracle", criterion_validation, 10.0);
  failures += run_criterion(2, "graphs match brute-force pair oracle", criterion_graphs, 0.0);
  failures += run_criterion(3, "solver correctness", criterion_solver, 60.0);
  failures += run_criterion(4, "rho and beta estimation", criterion_rho, 600.0);
  failures += run_criterion(5, "smallest splitting depth", criterion_min_k, 0.0);
  failures += run_criterion(6, "shared-sample functional identities", criterion_identities, 0.0);
  failures += run_criterion(7, "inequality harness stability", criterion_harness, 1800.0);
  failures += run_criterion(8, "volume scan and KS sandwich", criterion_ahlfors, 0.0);
  failures += run_criterion(9, "byte-identical CLI artifacts", criterion_reproducibility, 0.0);

  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
