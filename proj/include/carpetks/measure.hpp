#pragma once

#include <cstdint>
#include <vector>

#include "carpetks/cell.hpp"
#include "carpetks/radius.hpp"
#include "carpetks/rng.hpp"

namespace carpetks {

/// Mass of one level-n cell under the self-similar probability measure,
/// N_*^{-n}. Exact as a rational 1 / N_*^n; masses over W_n sum to 1.
double cell_measure(const CarpetSpec& spec, int level);

/// Draws a depth-`depth` address with i.i.d. uniform digits on S.
Address sample_address(const CarpetSpec& spec, int depth, Rng& rng);

/// Two-sided bracket of mu(B(center, radius)) from a level-`level` box
/// classification: `lower` counts boxes inside the closed ball, `upper`
/// additionally counts boxes meeting it.
struct BallMassBracket {
  Address center;
  Radius radius;
  int level = 0;
  double lower = 0.0;
  double upper = 0.0;
  double midpoint() const { return 0.5 * (lower + upper); }
  double half_width() const { return 0.5 * (upper - lower); }
};

/// Classifies boxes by exact squared-distance comparison against the
/// clamped nearest/farthest corner, pruning whole subtrees that are fully
/// inside or outside. `max_boxes` bounds the number of box visits.
BallMassBracket measure_ball(const CarpetSpec& spec, const Address& center, const Radius& radius,
                             int level, std::int64_t max_boxes = 50'000'000);

struct AhlforsRow {
  Radius radius;
  double ratio_min = 0.0;   // min over centers of mu(B)/r^alpha (bracket midpoint)
  double ratio_max = 0.0;
  double max_bracket_rel = 0.0;  // worst half-width / midpoint seen
};

struct AhlforsScan {
  double c_lower = 0.0;  // global min of mu(B)/r^alpha
  double c_upper = 0.0;  // global max
  std::vector<AhlforsRow> rows;
  std::uint64_t seed = 0;
  int samples = 0;
  int level = 0;
};

AhlforsScan ahlfors_scan(const CarpetSpec& spec, int samples, const std::vector<Radius>& radii,
                         int level, std::uint64_t seed, int center_depth = 12);

}  // namespace carpetks
