#include "carpetks/functionals.hpp"

#include <algorithm>
#include <thread>

#include "carpetks/reduce.hpp"

namespace carpetks {

// ---------------------------------------------------------------------------
// EvalFunction

EvalFunction EvalFunction::analytic(PointFunction f, std::string name) {
  EvalFunction out;
  Part part;
  part.point = std::move(f);
  out.parts_.push_back(std::move(part));
  out.name_ = std::move(name);
  return out;
}

EvalFunction EvalFunction::from_cells(CellFunction f, std::string name, bool exact) {
  EvalFunction out;
  Part part;
  part.cells = std::make_shared<const CellFunction>(std::move(f));
  part.exact_cells = exact;
  out.parts_.push_back(std::move(part));
  out.name_ = std::move(name);
  return out;
}

EvalFunction EvalFunction::coordinate(int axis) {
  if (axis < 1) throw config_error("coordinate axis is 1-based");
  const std::size_t k = static_cast<std::size_t>(axis - 1);
  return analytic([k](std::span<const double> x) { return x[k]; }, "x" + std::to_string(axis));
}

double EvalFunction::eval_at(const CarpetSpec& spec, const Address& addr,
                             std::span<const double> anchor) const {
  double v = offset_;
  for (const auto& part : parts_) {
    const double pv = part.cells ? part.cells->value_at_word(addr.word) : part.point(anchor);
    v += part.coef * pv;
  }
  return v;
}

double EvalFunction::eval(const CarpetSpec& spec, const Address& addr) const {
  auto anchor = addr.anchor(spec);
  return eval_at(spec, addr, anchor);
}

double EvalFunction::delta(const CarpetSpec& spec, const Address& x, const Address& y,
                           std::span<const double> ax, std::span<const double> ay) const {
  double d = 0.0;
  for (const auto& part : parts_) {
    const double px = part.cells ? part.cells->value_at_word(x.word) : part.point(ax);
    const double py = part.cells ? part.cells->value_at_word(y.word) : part.point(ay);
    d += part.coef * (px - py);
  }
  return d;
}

int EvalFunction::cell_level() const {
  int m = 0;
  for (const auto& part : parts_)
    if (part.cells && !part.exact_cells) m = std::max(m, part.cells->level());
  return m;
}

int EvalFunction::eval_depth() const {
  int m = 0;
  for (const auto& part : parts_)
    if (part.cells) m = std::max(m, part.cells->level());
  return m;
}

bool EvalFunction::cell_only() const {
  for (const auto& part : parts_)
    if (!part.cells) return false;
  return !parts_.empty();
}

CellFunction EvalFunction::average_on(std::shared_ptr<const LevelGraph> coarse,
                                      int quad_depth) const {
  const auto& spec = coarse->spec();
  const int n = coarse->level();
  std::vector<double> vals(coarse->vertex_count(), offset_);
  for (const auto& part : parts_) {
    if (part.cells) {
      if (part.cells->level() <= n) {
        // Constant on each target cell: ancestor lookup.
        for (std::uint32_t i = 0; i < coarse->vertex_count(); ++i) {
          auto cell = cell_of_lattice(spec, n, coarse->lattice_of(i));
          vals[i] += part.coef * part.cells->value_at_word(cell.word);
        }
      } else {
        auto avg = cell_average(*part.cells, coarse);
        for (std::uint32_t i = 0; i < coarse->vertex_count(); ++i)
          vals[i] += part.coef * avg.values[i];
      }
    } else {
      auto avg = cell_average_point(part.point, coarse, quad_depth);
      for (std::uint32_t i = 0; i < coarse->vertex_count(); ++i)
        vals[i] += part.coef * avg.values[i];
    }
  }
  return {std::move(coarse), std::move(vals)};
}

EvalFunction EvalFunction::scaled(double lambda) const {
  EvalFunction out = *this;
  for (auto& part : out.parts_) part.coef *= lambda;
  out.offset_ *= lambda;
  out.name_ = std::to_string(lambda) + "*" + name_;
  return out;
}

EvalFunction EvalFunction::shifted(double constant) const {
  EvalFunction out = *this;
  out.offset_ += constant;
  out.name_ = name_ + "+" + std::to_string(constant);
  return out;
}

EvalFunction EvalFunction::plus(const EvalFunction& other) const {
  EvalFunction out = *this;
  out.parts_.insert(out.parts_.end(), other.parts_.begin(), other.parts_.end());
  out.offset_ += other.offset_;
  out.name_ = name_ + "+" + other.name_;
  return out;
}

// ---------------------------------------------------------------------------
// Conditional pair sampling

namespace {

// Decodes a level-`nc` lattice into digit ids; returns false when some digit
// leaves S (the lattice position is a hole).
bool decode_word(const CarpetSpec& spec, int nc, const std::vector<std::int64_t>& lattice,
                 Word& out) {
  const int dim = spec.dim();
  out.resize(static_cast<std::size_t>(nc));
  std::int64_t scale = ipow(spec.base(), nc) / spec.base();
  std::vector<std::int64_t> rem = lattice;
  std::vector<int> digit(static_cast<std::size_t>(dim));
  for (int m = 0; m < nc; ++m) {
    for (int k = 0; k < dim; ++k) {
      digit[static_cast<std::size_t>(k)] = static_cast<int>(rem[static_cast<std::size_t>(k)] / scale);
      rem[static_cast<std::size_t>(k)] %= scale;
    }
    auto id = spec.digit_id(digit);
    if (!id) return false;
    out[static_cast<std::size_t>(m)] = *id;
    scale = scale > 1 ? scale / spec.base() : 1;
  }
  return true;
}

// Valid carpet cells at level `nc` within Chebyshev lattice `range` of a
// given cell, as decoded words. Eagerly cached for all cells when W_nc is
// small so that parallel streams can share it read-only.
class CandidateSource {
 public:
  CandidateSource(const CarpetSpec& spec, int nc, int range)
      : spec_(spec), nc_(nc), range_(range), side_(ipow(spec.base(), nc)) {
    std::int64_t count = 1;
    bool small = true;
    for (int i = 0; i < nc; ++i) {
      count *= spec.nstar();
      if (count > 40000) {
        small = false;
        break;
      }
    }
    if (small) {
      cache_keys_.reserve(static_cast<std::size_t>(count));
      std::vector<int> word(static_cast<std::size_t>(nc), 0);
      for (std::int64_t i = 0; i < count; ++i) {
        std::vector<std::int64_t> lat(static_cast<std::size_t>(spec.dim()), 0);
        for (int m = 0; m < nc; ++m) {
          const auto& d = spec.digit(word[static_cast<std::size_t>(m)]);
          for (int k = 0; k < spec.dim(); ++k)
            lat[static_cast<std::size_t>(k)] = lat[static_cast<std::size_t>(k)] * spec.base() + d[static_cast<std::size_t>(k)];
        }
        cache_keys_.push_back(pack(lat));
        int m = nc - 1;
        while (m >= 0 && ++word[static_cast<std::size_t>(m)] == spec.nstar()) {
          word[static_cast<std::size_t>(m)] = 0;
          --m;
        }
      }
      std::sort(cache_keys_.begin(), cache_keys_.end());
      cache_cands_.resize(cache_keys_.size());
      for (std::size_t i = 0; i < cache_keys_.size(); ++i)
        compute(unpack(cache_keys_[i]), cache_cands_[i]);
      cached_ = true;
    }
  }

  // Candidate words around `lat` in a deterministic (offset-lexicographic)
  // order; `lat` itself is always a member.
  const std::vector<Word>& candidates(const std::vector<std::int64_t>& lat,
                                      std::vector<Word>& scratch) const {
    if (cached_) {
      const std::uint64_t key = pack(lat);
      auto it = std::lower_bound(cache_keys_.begin(), cache_keys_.end(), key);
      return cache_cands_[static_cast<std::size_t>(it - cache_keys_.begin())];
    }
    compute(lat, scratch);
    return scratch;
  }

 private:
  std::uint64_t pack(const std::vector<std::int64_t>& lat) const {
    std::uint64_t key = 0;
    for (auto v : lat) key = key * static_cast<std::uint64_t>(side_) + static_cast<std::uint64_t>(v);
    return key;
  }

  std::vector<std::int64_t> unpack(std::uint64_t key) const {
    std::vector<std::int64_t> lat(static_cast<std::size_t>(spec_.dim()));
    for (int k = spec_.dim() - 1; k >= 0; --k) {
      lat[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(side_));
      key /= static_cast<std::uint64_t>(side_);
    }
    return lat;
  }

  void compute(const std::vector<std::int64_t>& lat, std::vector<Word>& out) const {
    out.clear();
    const int dim = spec_.dim();
    std::vector<std::int64_t> probe(static_cast<std::size_t>(dim));
    std::vector<std::int64_t> off(static_cast<std::size_t>(dim), -range_);
    Word word;
    for (;;) {
      bool in_range = true;
      for (int k = 0; k < dim; ++k) {
        probe[static_cast<std::size_t>(k)] = lat[static_cast<std::size_t>(k)] + off[static_cast<std::size_t>(k)];
        if (probe[static_cast<std::size_t>(k)] < 0 || probe[static_cast<std::size_t>(k)] >= side_) {
          in_range = false;
          break;
        }
      }
      if (in_range && decode_word(spec_, nc_, probe, word)) out.push_back(word);
      int k = dim - 1;
      while (k >= 0 && ++off[static_cast<std::size_t>(k)] > range_) {
        off[static_cast<std::size_t>(k)] = -range_;
        --k;
      }
      if (k < 0) break;
    }
  }

  const CarpetSpec& spec_;
  int nc_;
  int range_;
  std::int64_t side_;
  bool cached_ = false;
  std::vector<std::uint64_t> cache_keys_;
  std::vector<std::vector<Word>> cache_cands_;
};

struct Window {
  double r_out = 0.0;
  double r_in = -1.0;  // ties go inward: accept r_in < d <= r_out
};

struct StreamSums {
  std::vector<double> sum;    // [func * windows + window]
  std::vector<double> sumsq;
  std::uint64_t accepted = 0;
  std::uint64_t samples = 0;
};

struct PassResult {
  std::vector<std::vector<FunctionalEstimate>> est;  // [func][window], raw integrals
  double acceptance = 0.0;
  std::uint64_t samples = 0;
};

// One pass of conditional pair sampling shared by every window and function.
// x ~ mu at `depth`; a candidate cell at level `nc` within `range` of x's
// cell is drawn uniformly and refined to depth; the importance weight
// (#candidates) N_*^{-nc} makes each window sum unbiased for the double
// integral over that window.
PassResult pair_pass(const CarpetSpec& spec, double p, int nc, int range, int depth,
                     const std::vector<const EvalFunction*>& fs, const std::vector<Window>& windows,
                     const MCConfig& mc,
                     const std::function<double(const Address&, std::span<const double>)>* x_scale =
                         nullptr) {
  const std::size_t nf = fs.size();
  const std::size_t nw = windows.size();
  const double cell_mass = std::pow(static_cast<double>(spec.nstar()), -nc);
  double max_r2 = 0.0;
  for (const auto& w : windows) max_r2 = std::max(max_r2, w.r_out * w.r_out);
  CandidateSource source(spec, nc, range);

  const std::uint64_t nstreams = (mc.samples + mc.stream_len - 1) / mc.stream_len;
  std::vector<StreamSums> streams(nstreams);

  auto run_stream = [&](std::uint64_t s) {
    StreamSums sums;
    sums.sum.assign(nf * nw, 0.0);
    sums.sumsq.assign(nf * nw, 0.0);
    Rng rng = Rng::stream(mc.seed, s);
    const std::uint64_t count = std::min(mc.stream_len, mc.samples - s * mc.stream_len);
    Address x, y;
    x.depth = depth;
    x.word.resize(static_cast<std::size_t>(depth));
    y.depth = depth;
    std::vector<std::int64_t> xlat(static_cast<std::size_t>(spec.dim()));
    std::vector<Word> scratch;
    for (std::uint64_t i = 0; i < count; ++i) {
      ++sums.samples;
      for (int m = 0; m < depth; ++m)
        x.word[static_cast<std::size_t>(m)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.nstar())));
      std::fill(xlat.begin(), xlat.end(), 0);
      for (int m = 0; m < nc; ++m) {
        const auto& d = spec.digit(x.word[static_cast<std::size_t>(m)]);
        for (int k = 0; k < spec.dim(); ++k)
          xlat[static_cast<std::size_t>(k)] = xlat[static_cast<std::size_t>(k)] * spec.base() + d[static_cast<std::size_t>(k)];
      }
      const auto& cands = source.candidates(xlat, scratch);
      const std::size_t pick = static_cast<std::size_t>(rng.below(cands.size()));
      y.word = cands[pick];
      y.word.resize(static_cast<std::size_t>(depth));
      for (int m = nc; m < depth; ++m)
        y.word[static_cast<std::size_t>(m)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.nstar())));
      const auto ax = x.anchor(spec);
      const auto ay = y.anchor(spec);
      double d2 = 0.0;
      for (int k = 0; k < spec.dim(); ++k) {
        const double dd = ax[static_cast<std::size_t>(k)] - ay[static_cast<std::size_t>(k)];
        d2 += dd * dd;
      }
      if (d2 > max_r2) continue;
      ++sums.accepted;
      const double dist = std::sqrt(d2);
      double weight = static_cast<double>(cands.size()) * cell_mass;
      if (x_scale) weight *= (*x_scale)(x, ax);
      for (std::size_t fi = 0; fi < nf; ++fi) {
        const double df = fs[fi]->delta(spec, x, y, ax, ay);
        const double term = weight * pow_abs(df, p);
        for (std::size_t wi = 0; wi < nw; ++wi) {
          if (dist <= windows[wi].r_out && dist > windows[wi].r_in) {
            sums.sum[fi * nw + wi] += term;
            sums.sumsq[fi * nw + wi] += term * term;
          }
        }
      }
    }
    streams[s] = std::move(sums);
  };

  const int threads = std::max(1, mc.threads);
  if (threads == 1 || nstreams <= 1) {
    for (std::uint64_t s = 0; s < nstreams; ++s) run_stream(s);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::uint64_t s = static_cast<std::uint64_t>(t); s < nstreams; s += static_cast<std::uint64_t>(threads))
          run_stream(s);
      });
    for (auto& th : pool) th.join();
  }

  PassResult out;
  out.samples = mc.samples;
  std::uint64_t accepted = 0;
  out.est.assign(nf, std::vector<FunctionalEstimate>(nw));
  for (std::size_t fi = 0; fi < nf; ++fi)
    for (std::size_t wi = 0; wi < nw; ++wi) {
      // Stream partials merge in stream order; identical for any thread count.
      std::vector<double> partial_sum, partial_sq;
      partial_sum.reserve(nstreams);
      partial_sq.reserve(nstreams);
      for (const auto& st : streams) {
        partial_sum.push_back(st.sum[fi * nw + wi]);
        partial_sq.push_back(st.sumsq[fi * nw + wi]);
      }
      const double total = pairwise_sum(partial_sum);
      const double totsq = pairwise_sum(partial_sq);
      const double n = static_cast<double>(mc.samples);
      FunctionalEstimate& e = out.est[fi][wi];
      e.raw = total / n;
      const double var = std::max(0.0, totsq / n - e.raw * e.raw);
      e.raw_std_err = std::sqrt(var / n);
      e.value = e.raw;
      e.std_err = e.raw_std_err;
      e.samples = mc.samples;
    }
  for (const auto& st : streams) accepted += st.accepted;
  out.acceptance = static_cast<double>(accepted) / static_cast<double>(mc.samples);
  for (auto& row : out.est)
    for (auto& e : row) e.acceptance = out.acceptance;
  if (out.acceptance < mc.min_acceptance)
    throw numeric_error("pair acceptance rate " + std::to_string(out.acceptance) +
                        " below floor; ball geometry mis-sized for this level");
  return out;
}

int ball_coarse_level(int n) { return n + 1; }

int ball_range(const CarpetSpec& spec, const GeometryConstants& consts) {
  // Candidate window: cells one level below the ball scale within
  // ceil(c a) lattice steps cover B(x, c a^{-n}).
  return static_cast<int>(std::ceil(consts.c * spec.base()));
}

void check_margin(const EvalFunction& f, int n) {
  const int m = f.cell_level();
  if (m > 0 && n > m - 2)
    throw config_error("functional level n=" + std::to_string(n) +
                       " too deep for cell function of level " + std::to_string(m) +
                       " (need n <= m-2)");
}

int pass_depth(const CarpetSpec&, const std::vector<const EvalFunction*>& fs, int nc,
               const MCConfig& mc) {
  int depth = nc - 1 + mc.extra_depth;
  for (const auto* f : fs) depth = std::max(depth, std::max(f->eval_depth(), nc + 1));
  return depth;
}

}  // namespace

FunctionalEstimate functional_A(const CarpetSpec& spec, const EvalFunction& f, int n,
                                const GeometryConstants& consts, const MCConfig& mc) {
  if (n < 1) throw config_error("functional level must be >= 1");
  check_margin(f, n);
  const int nc = ball_coarse_level(n);
  std::vector<const EvalFunction*> fs{&f};
  std::vector<Window> windows{{consts.c * std::pow(spec.base(), -n), -1.0}};
  auto pass = pair_pass(spec, consts.p, nc, ball_range(spec, consts),
                        pass_depth(spec, fs, nc, mc), fs, windows, mc);
  FunctionalEstimate e = pass.est[0][0];
  const double pref = std::pow(static_cast<double>(spec.base()), (consts.alpha + consts.beta) * n);
  e.value = pref * e.raw;
  e.std_err = pref * e.raw_std_err;
  return e;
}

FunctionalEstimate annulus_A(const CarpetSpec& spec, const EvalFunction& f, int n,
                             const GeometryConstants& consts, const MCConfig& mc) {
  if (n < 1) throw config_error("annulus level must be >= 1");
  check_margin(f, n);
  const int nc = ball_coarse_level(n);
  std::vector<const EvalFunction*> fs{&f};
  const double r_out = consts.c * std::pow(spec.base(), -n);
  std::vector<Window> windows{{r_out, r_out / spec.base()}};
  auto pass = pair_pass(spec, consts.p, nc, ball_range(spec, consts),
                        pass_depth(spec, fs, nc, mc), fs, windows, mc);
  return pass.est[0][0];
}

BallAnnuliDecomposition ball_annuli(const CarpetSpec& spec, const EvalFunction& f, int n, int J,
                                    const GeometryConstants& consts, const MCConfig& mc) {
  if (n < 1) throw config_error("functional level must be >= 1");
  if (J < 0) throw config_error("annulus count J must be >= 0");
  check_margin(f, n);
  const int nc = ball_coarse_level(n);
  std::vector<const EvalFunction*> fs{&f};
  std::vector<Window> windows;
  const double r0 = consts.c * std::pow(spec.base(), -n);
  windows.push_back({r0, -1.0});  // ball
  double r = r0;
  for (int j = 0; j <= J; ++j) {
    windows.push_back({r, r / spec.base()});
    r /= spec.base();
  }
  windows.push_back({r, -1.0});  // tail: d <= c a^{-(n+J+1)}
  auto pass = pair_pass(spec, consts.p, nc, ball_range(spec, consts),
                        pass_depth(spec, fs, nc, mc), fs, windows, mc);
  BallAnnuliDecomposition out;
  out.ball = pass.est[0][0];
  out.annuli.assign(pass.est[0].begin() + 1, pass.est[0].end() - 1);
  out.tail = pass.est[0].back();
  out.prefactor = std::pow(static_cast<double>(spec.base()), (consts.alpha + consts.beta) * n);
  return out;
}

std::vector<FunctionalEstimate> functional_A_multi(const CarpetSpec& spec,
                                                   const std::vector<EvalFunction>& fns, int n,
                                                   const GeometryConstants& consts,
                                                   const MCConfig& mc) {
  if (n < 1) throw config_error("functional level must be >= 1");
  std::vector<const EvalFunction*> fs;
  for (const auto& f : fns) {
    check_margin(f, n);
    fs.push_back(&f);
  }
  const int nc = ball_coarse_level(n);
  std::vector<Window> windows{{consts.c * std::pow(spec.base(), -n), -1.0}};
  auto pass = pair_pass(spec, consts.p, nc, ball_range(spec, consts),
                        pass_depth(spec, fs, nc, mc), fs, windows, mc);
  const double pref = std::pow(static_cast<double>(spec.base()), (consts.alpha + consts.beta) * n);
  std::vector<FunctionalEstimate> out;
  for (auto& row : pass.est) {
    FunctionalEstimate e = row[0];
    e.value = pref * e.raw;
    e.std_err = pref * e.raw_std_err;
    out.push_back(e);
  }
  return out;
}

KsEstimate ks_E(const CarpetSpec& spec, const EvalFunction& f, double r, double p, double delta,
                const MCConfig& mc, int bracket_level) {
  if (!(r > 0.0) || r > std::sqrt(static_cast<double>(spec.dim())))
    throw config_error("ks_E radius must lie in (0, sqrt(D)]");
  const int nc = std::max(1, static_cast<int>(std::ceil(std::log(1.0 / r) / std::log(static_cast<double>(spec.base()))))) + 1;
  const int range = static_cast<int>(std::ceil(r * std::pow(spec.base(), nc)));
  std::vector<const EvalFunction*> fs{&f};
  const int depth = pass_depth(spec, fs, nc, mc);
  // Ball masses per accepted x; single-threaded so the half-width diagnostic
  // accumulates in a fixed order.
  MCConfig serial = mc;
  serial.threads = 1;
  double hw_sum = 0.0;
  std::uint64_t hw_count = 0;
  const Radius rad = Radius::approximate(r);
  std::function<double(const Address&, std::span<const double>)> x_scale =
      [&](const Address& x, std::span<const double>) {
        auto b = measure_ball(spec, x, rad, bracket_level);
        const double mid = b.midpoint();
        if (mid <= 0.0) throw numeric_error("empty ball mass bracket; raise bracketing level");
        hw_sum += b.half_width() / mid;
        ++hw_count;
        return 1.0 / mid;
      };
  std::vector<Window> windows{{r, -1.0}};
  auto pass = pair_pass(spec, p, nc, range, depth, fs, windows, serial, &x_scale);
  KsEstimate out;
  out.samples = pass.samples;
  out.acceptance = pass.acceptance;
  out.avg_mass_rel_halfwidth = hw_count ? hw_sum / static_cast<double>(hw_count) : 0.0;
  if (out.avg_mass_rel_halfwidth > 0.25)
    throw numeric_error("ball-mass bracket half-width exceeds 25% of mass; raise bracketing level");
  const double pref = std::pow(r, -p * delta);
  out.value = pref * pass.est[0][0].raw;
  out.std_err = pref * pass.est[0][0].raw_std_err + out.value * out.avg_mass_rel_halfwidth;
  return out;
}

double poincare_deficit(const CellFunction& f, std::shared_ptr<const LevelGraph> coarse,
                        double p, double beta) {
  const int m = f.level();
  const int n = coarse->level();
  auto avg = cell_average(f, coarse);
  const std::int64_t shrink = ipow(coarse->spec().base(), m - n);
  PairwiseAccumulator acc;
  for (std::uint32_t i = 0; i < f.graph->vertex_count(); ++i) {
    auto lat = f.graph->lattice_of(i);
    for (auto& v : lat) v /= shrink;
    const double diff = f.values[i] - avg.values[*coarse->index_of(lat)];
    acc.add(pow_abs(diff, p));
  }
  const double mass = 1.0 / static_cast<double>(f.graph->vertex_count());
  return std::pow(static_cast<double>(coarse->spec().base()), beta * n) * acc.total() * mass;
}

McValue poincare_deficit_mc(const CarpetSpec& spec, const EvalFunction& f,
                            const CellFunction& coarse_avg, double p, double beta,
                            const MCConfig& mc) {
  const int n = coarse_avg.level();
  const int depth = std::max({f.eval_depth(), n + mc.extra_depth});
  const std::uint64_t nstreams = (mc.samples + mc.stream_len - 1) / mc.stream_len;
  std::vector<double> sums(nstreams, 0.0), sqs(nstreams, 0.0);
  for (std::uint64_t s = 0; s < nstreams; ++s) {
    Rng rng = Rng::stream(mc.seed, s);
    const std::uint64_t count = std::min(mc.stream_len, mc.samples - s * mc.stream_len);
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t i = 0; i < count; ++i) {
      Address x = sample_address(spec, depth, rng);
      const double diff = f.eval(spec, x) - coarse_avg.value_at_word(x.word);
      const double term = pow_abs(diff, p);
      sum += term;
      sq += term * term;
    }
    sums[s] = sum;
    sqs[s] = sq;
  }
  const double nsamples = static_cast<double>(mc.samples);
  const double mean = pairwise_sum(sums) / nsamples;
  const double var = std::max(0.0, pairwise_sum(sqs) / nsamples - mean * mean);
  const double pref = std::pow(static_cast<double>(spec.base()), beta * n);
  return {pref * mean, pref * std::sqrt(var / nsamples)};
}

HolderResult holder_ratio(const CarpetSpec& spec, const EvalFunction& f,
                          const GeometryConstants& consts, std::uint64_t pairs,
                          std::uint64_t seed, int max_scale, int depth) {
  if (max_scale < 1) throw config_error("holder_ratio needs max_scale >= 1");
  depth = std::max({depth, f.eval_depth(), max_scale + 2});
  std::vector<std::unique_ptr<CandidateSource>> sources;
  for (int s = 1; s <= max_scale; ++s)
    sources.push_back(std::make_unique<CandidateSource>(spec, s + 1, ball_range(spec, consts)));
  Rng rng(seed);
  HolderResult out;
  out.pairs = pairs;
  std::vector<std::int64_t> xlat(static_cast<std::size_t>(spec.dim()));
  std::vector<Word> scratch;
  const double expo = consts.beta - consts.alpha;
  for (std::uint64_t i = 0; i < pairs; ++i) {
    Address x = sample_address(spec, depth, rng);
    Address y;
    const int slot = static_cast<int>(i % static_cast<std::uint64_t>(max_scale + 1));
    if (slot == 0) {
      y = sample_address(spec, depth, rng);
    } else {
      const int nc = slot + 1;
      std::fill(xlat.begin(), xlat.end(), 0);
      for (int m = 0; m < nc; ++m) {
        const auto& d = spec.digit(x.word[static_cast<std::size_t>(m)]);
        for (int k = 0; k < spec.dim(); ++k)
          xlat[static_cast<std::size_t>(k)] = xlat[static_cast<std::size_t>(k)] * spec.base() + d[static_cast<std::size_t>(k)];
      }
      const auto& cands = sources[static_cast<std::size_t>(slot - 1)]->candidates(xlat, scratch);
      y.word = cands[static_cast<std::size_t>(rng.below(cands.size()))];
      y.depth = depth;
      y.word.resize(static_cast<std::size_t>(depth));
      for (int m = nc; m < depth; ++m)
        y.word[static_cast<std::size_t>(m)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.nstar())));
    }
    const auto ax = x.anchor(spec);
    const auto ay = y.anchor(spec);
    double d2 = 0.0;
    for (int k = 0; k < spec.dim(); ++k) {
      const double dd = ax[static_cast<std::size_t>(k)] - ay[static_cast<std::size_t>(k)];
      d2 += dd * dd;
    }
    if (d2 <= 0.0) continue;
    const double dist = std::sqrt(d2);
    const double df = f.delta(spec, x, y, ax, ay);
    const double ratio = pow_abs(df, consts.p) / std::pow(dist, expo);
    if (ratio > out.sup_ratio) {
      out.sup_ratio = ratio;
      out.x = x;
      out.y = y;
      out.distance = dist;
    }
  }
  return out;
}

}  // namespace carpetks
