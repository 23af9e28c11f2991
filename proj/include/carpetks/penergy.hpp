#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "carpetks/cellfunction.hpp"

namespace carpetks {

enum class SolverMethod { iteratively_reweighted, coordinate_descent, damped_newton };

struct SolverConfig {
  double p = 2.0;
  double tol = 1e-12;        // relative energy-decrease stopping threshold
  double grad_tol = 1e-8;    // max first-order residual at free vertices
  int max_iter = 200;        // outer IRLS iterations
  int max_sweeps = 2000000;  // coordinate-descent polish sweeps
  SolverMethod method = SolverMethod::iteratively_reweighted;
  double weight_floor = 1e-12;  // floor on |du|^(p-2)
  double delta_floor = 1e-10;   // floor on |du| inside the weight
  int cg_max_iter = 100000;
  double cg_tol = 1e-14;
};

/// Raw p-energy sum over unordered edges of |f(w)-f(v)|^p, via a
/// deterministic pairwise reduction. With `rho` given, returns rho^n times
/// the raw value (the rescaled energy).
double graph_p_energy(const LevelGraph& graph, const CellFunction& f, double p,
                      std::optional<double> rho = std::nullopt);
double graph_p_energy(const LevelGraph& graph, std::span<const double> values, double p,
                      std::optional<double> rho = std::nullopt);

struct SolveResult {
  CellFunction minimizer;
  double energy = 0.0;
  double residual = 0.0;  // max first-order residual over free vertices
  int iterations = 0;
  bool converged = false;
};

/// Minimizes the p-energy with fixed boundary values, p > 1. IRLS with a
/// weight floor, warm-started from the p=2 solve, then coordinate-descent
/// polish to drive the first-order residual below grad_tol. Throws a
/// numeric error (carrying the last residual) on non-convergence.
SolveResult p_harmonic_solve(std::shared_ptr<const LevelGraph> graph,
                             const std::vector<std::pair<std::uint32_t, double>>& boundary,
                             const SolverConfig& cfg,
                             const std::vector<double>* initial = nullptr);

/// Min p-energy with the axis-1 low face pinned to 0 and the high face to 1.
struct CapacityResult {
  double capacity = 0.0;
  SolveResult solve;
  std::shared_ptr<const LevelGraph> graph;
};

CapacityResult p_capacity(std::shared_ptr<const LevelGraph> graph, const SolverConfig& cfg,
                          const std::vector<double>* initial = nullptr);
CapacityResult p_capacity(std::shared_ptr<const CarpetSpec> spec, int level, const SolverConfig& cfg);

struct RhoEstimate {
  double p = 0.0;
  std::vector<int> levels;
  std::vector<double> capacities;   // cap_{p,n} per level
  std::vector<double> ratios;       // cap_{p,n} / cap_{p,n+1}
  double rho_hat = 0.0;             // last ratio
  double rho_extrap = 0.0;          // Aitken (>=3 ratios) or linear extrapolation
  double beta_hat = 0.0;            // log(N_* rho_hat) / log a
  bool supercritical = false;       // rho_hat > 1
  std::shared_ptr<const LevelGraph> final_graph;  // level_hi graph
  std::vector<double> final_values;               // its capacity minimizer
};

/// Capacity-ratio estimate of the rescaling factor rho_p and of
/// beta_p = log(N_* rho_p)/log a. Solves are warm-started coarse-to-fine.
/// This is a computable surrogate for the submultiplicativity limit; it may
/// differ from the true rho_p by a bounded factor, and reports say so.
RhoEstimate estimate_rho_beta(std::shared_ptr<const CarpetSpec> spec, double p,
                              int level_lo, int level_hi, const SolverConfig& cfg);

struct MinK {
  int k = 0;
  bool borderline = false;  // decision fell inside the floating-point guard band
  double tail_ratio = 0.0;  // 2^((p-1)/k) a^(-(beta-alpha))
};

/// Smallest integer k >= 1 with 2^(p-1) < a^((beta-alpha)k), with a guard
/// band on the strict inequality. Requires beta > alpha.
MinK min_k(double p, int a, double alpha, double beta, double guard = 1e-12);

}  // namespace carpetks
