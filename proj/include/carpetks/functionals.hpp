#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "carpetks/cellfunction.hpp"
#include "carpetks/measure.hpp"
#include "carpetks/penergy.hpp"

namespace carpetks {

/// Function on K evaluable at finite addresses: an analytic point rule, a
/// cell function (value of the depth-m ancestor cell), or an affine
/// combination of those. Evaluation is deterministic.
class EvalFunction {
 public:
  static EvalFunction analytic(PointFunction f, std::string name);
  /// With exact = true the cell values ARE the function (a genuine piecewise
  /// constant on level-m cells), so no functional-level margin applies; with
  /// exact = false they stand in for a finer function and levels are
  /// restricted to n <= m - 2.
  static EvalFunction from_cells(CellFunction f, std::string name, bool exact = false);
  static EvalFunction coordinate(int axis);  // x_axis, 1-based

  double eval(const CarpetSpec& spec, const Address& addr) const;
  double eval_at(const CarpetSpec& spec, const Address& addr, std::span<const double> anchor) const;

  /// f(x) - f(y) computed part-wise so that additive constants cancel
  /// exactly and power-of-two scalings commute with rounding.
  double delta(const CarpetSpec& spec, const Address& x, const Address& y,
               std::span<const double> ax, std::span<const double> ay) const;

  /// Max level among non-exact cell parts (governs the functional-level
  /// margin); 0 when purely analytic or exact piecewise constant.
  int cell_level() const;
  /// Max level among all cell parts: the minimum word depth needed to
  /// evaluate. 0 when purely analytic.
  int eval_depth() const;
  /// True when every part is cell-backed (evaluation is exact on any graph
  /// at least as deep as eval_depth()).
  bool cell_only() const;

  /// Cell averages M_n f on the coarse graph: exact for cell parts (nested
  /// averaging, or ancestor lookup when the part is coarser than the target),
  /// anchor quadrature at `quad_depth` for analytic parts.
  CellFunction average_on(std::shared_ptr<const LevelGraph> coarse, int quad_depth) const;

  EvalFunction scaled(double lambda) const;
  EvalFunction shifted(double constant) const;
  EvalFunction plus(const EvalFunction& other) const;

  const std::string& name() const { return name_; }

 private:
  struct Part {
    double coef = 1.0;
    PointFunction point;                        // one of point / cells set
    std::shared_ptr<const CellFunction> cells;
    bool exact_cells = false;
  };
  std::vector<Part> parts_;
  double offset_ = 0.0;
  std::string name_;
};

/// The constants entering the grid-scale functionals; c must exceed 2 sqrt(D)
/// so that cell diameters and adjacent-pair separations stay below c a^{-n}.
struct GeometryConstants {
  double c = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 2.0;

  static double default_c(int dim) { return 2.0 * std::sqrt(static_cast<double>(dim)) + 0.125; }

  static GeometryConstants make(const CarpetSpec& spec, double p, double beta) {
    GeometryConstants g;
    g.c = default_c(spec.dim());
    g.alpha = spec.alpha();
    g.beta = beta;
    g.p = p;
    if (!(g.c > 2.0 * std::sqrt(static_cast<double>(spec.dim()))))
      throw config_error("ball constant must exceed 2 sqrt(D)");
    return g;
  }
};

/// Seeded Monte-Carlo configuration; identical seed implies identical
/// estimates. Samples are partitioned into fixed-length streams whose
/// partial sums merge in stream order, so parallel runs reproduce the
/// single-thread result.
struct MCConfig {
  std::uint64_t seed = 20240817;
  std::uint64_t samples = 200000;
  int extra_depth = 8;       // sampling depth = n + extra_depth
  std::uint64_t stream_len = 65536;
  int threads = 1;
  double min_acceptance = 1e-4;  // pair-acceptance floor; below it the geometry is mis-sized
};

struct FunctionalEstimate {
  double value = 0.0;      // prefactored estimate
  double std_err = 0.0;
  double raw = 0.0;        // un-prefactored double integral
  double raw_std_err = 0.0;
  std::uint64_t samples = 0;
  double acceptance = 0.0;
};

/// a^{(alpha+beta)n} times the mu x mu integral of |f(x)-f(y)|^p over pairs
/// with d(x,y) <= c a^{-n}. The conditional y-sampling proposes uniformly
/// from carpet cells one level below the ball scale within lattice range
/// ceil(c a) of x's cell, importance-corrected to stay unbiased.
FunctionalEstimate functional_A(const CarpetSpec& spec, const EvalFunction& f, int n,
                                const GeometryConstants& consts, const MCConfig& mc);

/// Raw annulus functional A_n: pairs with c a^{-(n+1)} < d <= c a^{-n}.
FunctionalEstimate annulus_A(const CarpetSpec& spec, const EvalFunction& f, int n,
                             const GeometryConstants& consts, const MCConfig& mc);

/// Ball integral and its annulus decomposition computed on one shared sample
/// stream, so the partition identity holds sample-wise: ball = sum of the
/// J+1 annuli plus the tail of pairs with d <= c a^{-(n+J+1)}.
struct BallAnnuliDecomposition {
  FunctionalEstimate ball;              // raw, window d <= c a^{-n}
  std::vector<FunctionalEstimate> annuli;  // raw A_{n+j}, j = 0..J
  FunctionalEstimate tail;              // raw, window d <= c a^{-(n+J+1)}
  double prefactor = 0.0;               // a^{(alpha+beta)n}
};

BallAnnuliDecomposition ball_annuli(const CarpetSpec& spec, const EvalFunction& f, int n, int J,
                                    const GeometryConstants& consts, const MCConfig& mc);

/// Shared-sample evaluation of the ball functional for several functions at
/// once (used for exact homogeneity / Minkowski checks).
std::vector<FunctionalEstimate> functional_A_multi(const CarpetSpec& spec,
                                                   const std::vector<EvalFunction>& fs, int n,
                                                   const GeometryConstants& consts,
                                                   const MCConfig& mc);

struct KsEstimate {
  double value = 0.0;
  double std_err = 0.0;         // MC error with bracket half-width folded in
  double avg_mass_rel_halfwidth = 0.0;
  std::uint64_t samples = 0;
  double acceptance = 0.0;
};

/// Korevaar-Schoen functional E_{p,delta}(f, r): r^{-p delta} times the mu
/// average over x of the B(x,r)-average of |f(x)-f(y)|^p. Ball masses come
/// from measure_ball brackets at `bracket_level` (midpoint used).
KsEstimate ks_E(const CarpetSpec& spec, const EvalFunction& f, double r, double p, double delta,
                const MCConfig& mc, int bracket_level);

/// a^{beta n} sum_w int_{K_w} |f - M_n f(w)|^p dmu, exact for a cell
/// function (mu is uniform over level-m cells).
double poincare_deficit(const CellFunction& f, std::shared_ptr<const LevelGraph> coarse,
                        double p, double beta);

struct McValue {
  double value = 0.0;
  double std_err = 0.0;
};

/// Monte-Carlo cross-check of the deficit for any evaluable f, given the
/// coarse averages M_n f.
McValue poincare_deficit_mc(const CarpetSpec& spec, const EvalFunction& f,
                            const CellFunction& coarse_avg, double p, double beta,
                            const MCConfig& mc);

struct HolderResult {
  double sup_ratio = 0.0;
  Address x, y;
  double distance = 0.0;
  std::uint64_t pairs = 0;
};

/// Empirical sup over sampled pairs of |f(x)-f(y)|^p / d(x,y)^{beta-alpha}.
/// Mixes independent pairs with conditional near pairs at scales up to
/// `max_scale` to probe small distances.
HolderResult holder_ratio(const CarpetSpec& spec, const EvalFunction& f,
                          const GeometryConstants& consts, std::uint64_t pairs,
                          std::uint64_t seed, int max_scale, int depth = 14);

}  // namespace carpetks
