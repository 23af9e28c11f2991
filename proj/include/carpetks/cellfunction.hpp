#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "carpetks/graph.hpp"

namespace carpetks {

/// A real-valued function on W_m, one value per cell in the graph's
/// canonical vertex order (lexicographic lattice order).
struct CellFunction {
  std::shared_ptr<const LevelGraph> graph;
  std::vector<double> values;

  int level() const { return graph->level(); }

  double value_at(std::uint32_t index) const { return values[index]; }

  /// Value of the cell containing the given word prefix; the word must have
  /// at least `level()` digits.
  double value_at_word(std::span<const int> word) const;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// M_n f for a cell function at level m >= n: the exact nesting average over
/// descendants. `coarse` must be the level-n graph on the same spec.
CellFunction cell_average(const CellFunction& fine, std::shared_ptr<const LevelGraph> coarse);

/// M_n f for a point-evaluable f: equal-weight quadrature over the anchors
/// of all depth-`quad_depth` descendants of each level-n cell.
CellFunction cell_average_point(const PointFunction& f, std::shared_ptr<const LevelGraph> coarse,
                                int quad_depth);

}  // namespace carpetks
