#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carpetks/functionals.hpp"

namespace carpetks {

enum class MemberRole { member, probe, negative_control };

const char* role_name(MemberRole role);

struct SuiteMember {
  EvalFunction f;
  MemberRole role = MemberRole::member;
  std::string provenance;  // how the function was constructed
};

struct VerifyConfig {
  double p = 2.0;
  int n_lo = 2;
  int n_hi = 5;
  int member_level = 7;   // depth of the deepest harmonic member
  int rho_level_lo = 3;   // capacity-ratio levels: rho_level_lo .. member_level
  int annuli_J = 5;       // annuli j = 0..J in the weighted series
  int quad_depth = 3;     // anchor-quadrature depth for analytic members
  std::uint64_t seed = 20240817;
  std::uint64_t samples = 200000;
  int threads = 1;
  double stability_threshold = 0.10;  // relative change of C_hat under doubled effort
  SolverConfig solver;
};

/// Harmonic members, affine composites, the coordinate probe and the coarse
/// piecewise-constant negative control, together with the geometry constants
/// inferred from the capacity-ratio estimate.
struct TestSuite {
  std::shared_ptr<const CarpetSpec> spec;
  GeometryConstants consts;
  RhoEstimate rho;
  MinK k;
  std::vector<SuiteMember> members;
};

TestSuite build_suite(std::shared_ptr<const CarpetSpec> spec, const VerifyConfig& cfg);

/// One inequality checked over a level range: left/right tables, the
/// empirical constant C_hat = max_n left/right, and its relative change
/// under doubled sampling/quadrature effort.
struct InequalityReport {
  std::string id;
  std::string function;
  std::vector<int> levels;
  std::vector<double> left;
  std::vector<double> right;
  double c_hat = 0.0;
  double c_hat_doubled = 0.0;
  double stability = 0.0;
  bool stable = false;
  bool trivial = false;      // all left-hand entries vanish
  bool growth_flag = false;  // left side grows across n (non-membership signal)
  double tail_fraction = 0.0;  // certified-tail share of the weighted-series RHS
  std::string notes;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
};

/// Per-function quantity tables at one sampling effort. e_tilde is the
/// rescaled graph energy rho^n E_p(M_n f); a_func the grid ball functional;
/// annuli_raw the un-prefactored annulus integrals A_{n+j}, j = 0..J, from
/// the same sample stream; deficit the cell-averaging Poincare deficit.
struct QuantityTables {
  std::vector<int> levels;
  std::vector<double> e_tilde;
  std::vector<double> a_func;
  std::vector<std::vector<double>> annuli_raw;
  std::vector<double> deficit;
  bool deficit_exact = false;
};

QuantityTables compute_tables(std::shared_ptr<const CarpetSpec> spec, const EvalFunction& f,
                              const GeometryConstants& consts, const VerifyConfig& cfg,
                              int effort);

InequalityReport verify_weak_monotonicity(std::shared_ptr<const CarpetSpec> spec,
                                          const EvalFunction& f, const GeometryConstants& consts,
                                          const VerifyConfig& cfg);

InequalityReport verify_theorem_main(std::shared_ptr<const CarpetSpec> spec, const EvalFunction& f,
                                     const GeometryConstants& consts, const VerifyConfig& cfg);

struct PropositionReports {
  InequalityReport prop1;      // A^{(n)} <= C sup_{l>=n} E~_l
  InequalityReport prop2;      // deficit <= C * weighted annulus series
  InequalityReport prop3;      // E~_n   <= C * weighted annulus series
  InequalityReport prop4;      // liminf E~ <= C liminf A^{(n)} (surrogates)
  InequalityReport lemma_pi;   // deficit <= C liminf_{l>n} E~_l
  InequalityReport eq_splice;  // A^{(n)} <= c (E~_n + deficit_n)
};

PropositionReports verify_propositions(std::shared_ptr<const CarpetSpec> spec,
                                       const EvalFunction& f, const GeometryConstants& consts,
                                       const MinK& k, const VerifyConfig& cfg);

struct VerifyBundle {
  TestSuite suite;
  std::vector<InequalityReport> reports;
  bool all_members_stable = false;
  bool negative_control_flagged = false;
};

/// Runs every verifier over the whole suite. Refuses when the capacity-ratio
/// estimate is subcritical (rho_hat <= 1): then p-energy convergence is
/// equivalent to the bound failing, and no finite constants are expected.
VerifyBundle run_suite(std::shared_ptr<const CarpetSpec> spec, const VerifyConfig& cfg);

}  // namespace carpetks
