#include "carpetks/measure.hpp"

#include <cmath>

namespace carpetks {

double cell_measure(const CarpetSpec& spec, int level) {
  if (level < 0) throw config_error("level must be >= 0");
  double m = 1.0;
  for (int i = 0; i < level; ++i) m /= spec.nstar();
  return m;
}

Address sample_address(const CarpetSpec& spec, int depth, Rng& rng) {
  if (depth < 1) throw config_error("sample depth must be >= 1");
  Address a;
  a.depth = depth;
  a.word.resize(static_cast<std::size_t>(depth));
  for (int m = 0; m < depth; ++m)
    a.word[static_cast<std::size_t>(m)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.nstar())));
  return a;
}

namespace {

struct BallWalker {
  const CarpetSpec& spec;
  const Radius& radius;
  int level;                       // classification level
  std::int64_t scale;              // a^L, L = max(center depth, level)
  int scale_level;
  std::vector<std::int64_t> center;  // anchor numerators at denominator scale
  std::int64_t boxes_left;
  double lower = 0.0;
  double upper = 0.0;

  // Box of a level-l cell spans [i*side, (i+1)*side] per axis at the common
  // integer scale, side = a^(L-l).
  void classify(int l, const std::vector<std::int64_t>& lattice, double mass) {
    if (--boxes_left < 0) throw budget_error("measure_ball box budget exceeded");
    const std::int64_t side = ipow(spec.base(), scale_level - l);
    std::int64_t near2 = 0, far2 = 0;
    for (int k = 0; k < spec.dim(); ++k) {
      const std::int64_t lo = lattice[static_cast<std::size_t>(k)] * side;
      const std::int64_t hi = lo + side;
      const std::int64_t c = center[static_cast<std::size_t>(k)];
      const std::int64_t near_d = c < lo ? lo - c : (c > hi ? c - hi : 0);
      const std::int64_t far_d = std::max(c - lo, hi - c);
      near2 += near_d * near_d;
      far2 += far_d * far_d;
    }
    if (radius.covers_sq(far2, scale)) {
      lower += mass;
      upper += mass;
      return;
    }
    if (!radius.covers_sq(near2, scale)) return;  // disjoint from the closed ball
    if (l == level) {
      upper += mass;
      return;
    }
    std::vector<std::int64_t> child(static_cast<std::size_t>(spec.dim()));
    const double child_mass = mass / spec.nstar();
    for (int id = 0; id < spec.nstar(); ++id) {
      const auto& d = spec.digit(id);
      for (int k = 0; k < spec.dim(); ++k)
        child[static_cast<std::size_t>(k)] =
            lattice[static_cast<std::size_t>(k)] * spec.base() + d[static_cast<std::size_t>(k)];
      classify(l + 1, child, child_mass);
    }
  }
};

}  // namespace

BallMassBracket measure_ball(const CarpetSpec& spec, const Address& center, const Radius& radius,
                             int level, std::int64_t max_boxes) {
  if (level < 0) throw config_error("bracket level must be >= 0");
  const int scale_level = std::max(center.depth, level);
  BallWalker w{spec, radius, level, ipow(spec.base(), scale_level), scale_level,
               center.anchor_scaled(spec, scale_level), max_boxes};
  std::vector<std::int64_t> root(static_cast<std::size_t>(spec.dim()), 0);
  w.classify(0, root, 1.0);
  BallMassBracket b;
  b.center = center;
  b.radius = radius;
  b.level = level;
  b.lower = w.lower;
  b.upper = w.upper;
  return b;
}

AhlforsScan ahlfors_scan(const CarpetSpec& spec, int samples, const std::vector<Radius>& radii,
                         int level, std::uint64_t seed, int center_depth) {
  if (samples < 1) throw config_error("ahlfors_scan needs at least one sample");
  if (radii.empty()) throw config_error("ahlfors_scan needs a radii grid");
  const double alpha = spec.alpha();
  AhlforsScan scan;
  scan.seed = seed;
  scan.samples = samples;
  scan.level = level;
  scan.rows.reserve(radii.size());
  for (const auto& r : radii) {
    AhlforsRow row;
    row.radius = r;
    row.ratio_min = 1e300;
    row.ratio_max = -1e300;
    scan.rows.push_back(row);
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    Address x = sample_address(spec, center_depth, rng);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      auto b = measure_ball(spec, x, radii[j], level);
      const double ratio = b.midpoint() / std::pow(radii[j].value, alpha);
      auto& row = scan.rows[j];
      row.ratio_min = std::min(row.ratio_min, ratio);
      row.ratio_max = std::max(row.ratio_max, ratio);
      if (b.midpoint() > 0.0)
        row.max_bracket_rel = std::max(row.max_bracket_rel, b.half_width() / b.midpoint());
    }
  }
  scan.c_lower = 1e300;
  scan.c_upper = -1e300;
  for (const auto& row : scan.rows) {
    scan.c_lower = std::min(scan.c_lower, row.ratio_min);
    scan.c_upper = std::max(scan.c_upper, row.ratio_max);
  }
  return scan;
}

}  // namespace carpetks
