#include "carpetks/penergy.hpp"

#include <algorithm>
#include <cmath>

#include "carpetks/reduce.hpp"

namespace carpetks {

double graph_p_energy(const LevelGraph& graph, std::span<const double> values, double p,
                      std::optional<double> rho) {
  if (values.size() != graph.vertex_count()) throw config_error("value count does not match graph level");
  if (p < 1.0) throw config_error("p must be >= 1");
  PairwiseAccumulator acc;
  for (const auto& [u, v] : graph.edges())
    acc.add(pow_abs(values[u] - values[v], p));
  double e = acc.total();
  if (rho) e *= std::pow(*rho, graph.level());
  return e;
}

double graph_p_energy(const LevelGraph& graph, const CellFunction& f, double p,
                      std::optional<double> rho) {
  if (f.graph->level() != graph.level()) throw config_error("cell function level does not match graph");
  return graph_p_energy(graph, f.values, p, rho);
}

namespace {

struct Problem {
  const LevelGraph& graph;
  std::vector<char> fixed;      // per vertex
  std::vector<double> values;   // boundary entries fixed
  double p;

  double energy() const { return graph_p_energy(graph, values, p); }

  // Max first-order residual over free vertices.
  double residual() const {
    std::vector<double> g(values.size(), 0.0);
    for (const auto& [u, v] : graph.edges()) {
      const double d = values[u] - values[v];
      const double t = p * std::pow(std::abs(d), p - 1.0) * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0));
      g[u] += t;
      g[v] -= t;
    }
    double r = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!fixed[i]) r = std::max(r, std::abs(g[i]));
    return r;
  }
};

// CG on the weighted graph Laplacian restricted to free vertices, with
// Jacobi preconditioning. x carries all vertices; fixed entries never move.
void weighted_laplacian_solve(Problem& prob, const std::vector<double>& weights,
                              const SolverConfig& cfg, std::vector<double>& x) {
  const auto& edges = prob.graph.edges();
  const std::size_t n = prob.values.size();
  std::vector<double> diag(n, 0.0), b(n, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    const double w = weights[e];
    diag[u] += w;
    diag[v] += w;
    if (prob.fixed[u] && !prob.fixed[v]) b[v] += w * prob.values[u];
    if (prob.fixed[v] && !prob.fixed[u]) b[u] += w * prob.values[v];
  }
  auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [u, v] = edges[e];
      const double iu = prob.fixed[u] ? 0.0 : in[u];
      const double iv = prob.fixed[v] ? 0.0 : in[v];
      const double d = weights[e] * (iu - iv);
      out[u] += d;
      out[v] -= d;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (prob.fixed[i]) out[i] = 0.0;
  };
  std::vector<double> r(n, 0.0), z(n), pdir(n), ap(n);
  matvec(x, ap);
  double b2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (prob.fixed[i]) continue;
    r[i] = b[i] - ap[i];
    b2 += b[i] * b[i];
  }
  auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = (prob.fixed[i] || diag[i] <= 0.0) ? 0.0 : in[i] / diag[i];
  };
  precond(r, z);
  pdir = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
  const double stop = cfg.cg_tol * cfg.cg_tol * std::max(b2, 1e-300);
  for (int it = 0; it < cfg.cg_max_iter; ++it) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += r[i] * r[i];
    if (r2 <= stop) break;
    matvec(pdir, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += pdir[i] * ap[i];
    if (pap <= 0.0) break;
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      if (prob.fixed[i]) continue;
      x[i] += alpha * pdir[i];
      r[i] -= alpha * ap[i];
    }
    precond(r, z);
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) pdir[i] = z[i] + beta * pdir[i];
  }
}

// Scalar minimization of sum_j |u - v_j|^p over one free vertex:
// safeguarded Newton with bisection fallback inside [min v_j, max v_j].
double coordinate_minimize(std::span<const double> nb, double p, double u0) {
  double lo = nb[0], hi = nb[0];
  for (double v : nb) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return lo;
  auto grad = [&](double u) {
    double g = 0.0;
    for (double v : nb) {
      const double d = u - v;
      g += std::pow(std::abs(d), p - 1.0) * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0));
    }
    return g;
  };
  double u = std::clamp(u0, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double g = grad(u);
    if (g > 0)
      hi = u;
    else if (g < 0)
      lo = u;
    else
      return u;
    double h = 0.0;  // second derivative, may be huge/zero for p far from 2
    for (double v : nb) {
      const double d = std::abs(u - v);
      if (d > 0) h += (p - 1.0) * std::pow(d, p - 2.0);
    }
    double next = (h > 0 && std::isfinite(h)) ? u - g / h : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-17 * std::max(1.0, std::abs(hi))) return 0.5 * (lo + hi);
    u = next;
  }
  return u;
}

}  // namespace

SolveResult p_harmonic_solve(std::shared_ptr<const LevelGraph> graph,
                             const std::vector<std::pair<std::uint32_t, double>>& boundary,
                             const SolverConfig& cfg,
                             const std::vector<double>* initial) {
  if (boundary.empty()) throw config_error("boundary assignment must be non-empty");
  if (cfg.p <= 1.0) throw config_error("p-harmonic minimization requires p > 1");
  const std::size_t n = graph->vertex_count();
  Problem prob{*graph, std::vector<char>(n, 0), std::vector<double>(n, 0.0), cfg.p};
  double bmean = 0.0;
  for (const auto& [idx, val] : boundary) {
    if (idx >= n) throw config_error("boundary index out of range");
    prob.fixed[idx] = 1;
    prob.values[idx] = val;
    bmean += val;
  }
  bmean /= static_cast<double>(boundary.size());
  if (initial) {
    if (initial->size() != n) throw config_error("initial guess size mismatch");
    for (std::size_t i = 0; i < n; ++i)
      if (!prob.fixed[i]) prob.values[i] = (*initial)[i];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (!prob.fixed[i]) prob.values[i] = bmean;
  }

  const auto& edges = graph->edges();
  std::vector<double> weights(edges.size(), 1.0);
  int outer = 0;

  if (cfg.method != SolverMethod::coordinate_descent) {
    // p = 2 warm start (unit weights), then IRLS reweighting for p != 2.
    weighted_laplacian_solve(prob, weights, cfg, prob.values);
    ++outer;
    if (cfg.p != 2.0) {
      double energy = prob.energy();
      for (; outer < cfg.max_iter; ++outer) {
        for (std::size_t e = 0; e < edges.size(); ++e) {
          const auto [u, v] = edges[e];
          const double d = std::max(std::abs(prob.values[u] - prob.values[v]), cfg.delta_floor);
          weights[e] = std::max(std::pow(d, cfg.p - 2.0), cfg.weight_floor);
        }
        std::vector<double> trial = prob.values;
        weighted_laplacian_solve(prob, weights, cfg, trial);
        // Backtrack toward the previous iterate if the energy went up.
        double t = 1.0;
        std::vector<double> cand(n);
        double cand_energy = 0.0;
        for (int bt = 0; bt < 40; ++bt) {
          for (std::size_t i = 0; i < n; ++i)
            cand[i] = prob.fixed[i] ? prob.values[i] : (1.0 - t) * prob.values[i] + t * trial[i];
          cand_energy = graph_p_energy(*graph, cand, cfg.p);
          if (cand_energy <= energy) break;
          t *= 0.5;
        }
        const double drop = energy - cand_energy;
        prob.values = std::move(cand);
        if (drop <= cfg.tol * std::max(energy, 1e-300)) {
          energy = cand_energy;
          break;
        }
        energy = cand_energy;
      }
    }
  }

  // Coordinate-descent polish: exact scalar minimization per free vertex
  // until the first-order residual target is met.
  double res = prob.residual();
  if (res > cfg.grad_tol) {
    std::vector<double> nb;
    for (int sweep = 0; sweep < cfg.max_sweeps && res > cfg.grad_tol; ++sweep) {
      for (std::uint32_t i = 0; i < n; ++i) {
        if (prob.fixed[i]) continue;
        auto nbs = graph->neighbors(i);
        nb.assign(nbs.size(), 0.0);
        for (std::size_t j = 0; j < nbs.size(); ++j) nb[j] = prob.values[nbs[j]];
        prob.values[i] = coordinate_minimize(nb, cfg.p, prob.values[i]);
      }
      if (sweep % 8 == 7 || sweep < 4) res = prob.residual();
    }
    res = prob.residual();
  }

  SolveResult out;
  out.minimizer = {graph, prob.values};
  out.energy = prob.energy();
  out.residual = res;
  out.iterations = outer;
  out.converged = res <= cfg.grad_tol;
  if (!out.converged)
    throw numeric_error("p-harmonic solve did not reach grad_tol; last residual " + std::to_string(res));
  return out;
}

CapacityResult p_capacity(std::shared_ptr<const LevelGraph> graph, const SolverConfig& cfg,
                          const std::vector<double>* initial) {
  std::vector<std::pair<std::uint32_t, double>> boundary;
  for (auto v : face_cells(*graph, 1, Side::low)) boundary.emplace_back(v, 0.0);
  for (auto v : face_cells(*graph, 1, Side::high)) boundary.emplace_back(v, 1.0);
  CapacityResult res;
  res.solve = p_harmonic_solve(graph, boundary, cfg, initial);
  res.capacity = res.solve.energy;
  res.graph = std::move(graph);
  return res;
}

CapacityResult p_capacity(std::shared_ptr<const CarpetSpec> spec, int level, const SolverConfig& cfg) {
  return p_capacity(build_level_graph(std::move(spec), level), cfg);
}

RhoEstimate estimate_rho_beta(std::shared_ptr<const CarpetSpec> spec, double p,
                              int level_lo, int level_hi, const SolverConfig& cfg) {
  if (level_lo < 1 || level_hi <= level_lo)
    throw config_error("rho estimation needs at least 2 consecutive levels");
  RhoEstimate est;
  est.p = p;
  SolverConfig scfg = cfg;
  scfg.p = p;
  std::shared_ptr<const LevelGraph> prev_graph;
  std::vector<double> prev_values;
  for (int n = level_lo; n <= level_hi; ++n) {
    auto graph = build_level_graph(spec, n);
    std::vector<double> init;
    const std::vector<double>* init_ptr = nullptr;
    if (prev_graph) {
      // Prolong the coarse minimizer: each child starts at its parent value.
      init.resize(graph->vertex_count());
      const std::int64_t b = spec->base();
      for (std::uint32_t i = 0; i < graph->vertex_count(); ++i) {
        auto lat = graph->lattice_of(i);
        for (auto& v : lat) v /= b;
        init[i] = prev_values[*prev_graph->index_of(lat)];
      }
      init_ptr = &init;
    }
    auto cap = p_capacity(graph, scfg, init_ptr);
    est.levels.push_back(n);
    est.capacities.push_back(cap.capacity);
    prev_graph = graph;
    prev_values = cap.solve.minimizer.values;
  }
  est.final_graph = prev_graph;
  est.final_values = prev_values;
  for (std::size_t i = 0; i + 1 < est.capacities.size(); ++i)
    est.ratios.push_back(est.capacities[i] / est.capacities[i + 1]);
  est.rho_hat = est.ratios.back();
  if (est.ratios.size() >= 3) {
    // Aitken delta-squared on the ratio sequence.
    const double r0 = est.ratios[est.ratios.size() - 3];
    const double r1 = est.ratios[est.ratios.size() - 2];
    const double r2 = est.ratios[est.ratios.size() - 1];
    const double denom = r2 - 2 * r1 + r0;
    est.rho_extrap = std::abs(denom) > 1e-14 ? r2 - (r2 - r1) * (r2 - r1) / denom : r2;
  } else if (est.ratios.size() == 2) {
    est.rho_extrap = est.ratios[1] + (est.ratios[1] - est.ratios[0]);
  } else {
    est.rho_extrap = est.rho_hat;
  }
  est.beta_hat = std::log(spec->nstar() * est.rho_hat) / std::log(static_cast<double>(spec->base()));
  est.supercritical = est.rho_hat > 1.0;
  return est;
}

MinK min_k(double p, int a, double alpha, double beta, double guard) {
  if (!(beta > alpha)) throw config_error("min_k requires beta > alpha");
  const double lhs = (p - 1.0) * std::log(2.0);
  const double step = (beta - alpha) * std::log(static_cast<double>(a));
  MinK out;
  for (int k = 1; k <= 1000000; ++k) {
    const double rhs = k * step;
    if (rhs > lhs + guard || std::abs(rhs - lhs) <= guard) {
      out.k = k;
      out.borderline = std::abs(rhs - lhs) <= guard;
      out.tail_ratio = std::pow(2.0, (p - 1.0) / k) * std::pow(static_cast<double>(a), -(beta - alpha));
      return out;
    }
  }
  throw numeric_error("min_k search exhausted");
}

}  // namespace carpetks
