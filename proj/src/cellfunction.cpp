#include "carpetks/cellfunction.hpp"

#include "carpetks/reduce.hpp"

namespace carpetks {

double CellFunction::value_at_word(std::span<const int> word) const {
  const auto& spec = graph->spec();
  const int m = level();
  if (static_cast<int>(word.size()) < m) throw config_error("word shorter than cell-function level");
  std::vector<std::int64_t> lattice(static_cast<std::size_t>(spec.dim()), 0);
  for (int l = 0; l < m; ++l) {
    const auto& d = spec.digit(word[static_cast<std::size_t>(l)]);
    for (int k = 0; k < spec.dim(); ++k)
      lattice[static_cast<std::size_t>(k)] = lattice[static_cast<std::size_t>(k)] * spec.base() + d[static_cast<std::size_t>(k)];
  }
  auto idx = graph->index_of(lattice);
  if (!idx) throw config_error("word prefix does not address a cell");
  return values[*idx];
}

CellFunction cell_average(const CellFunction& fine, std::shared_ptr<const LevelGraph> coarse) {
  const int m = fine.level();
  const int n = coarse->level();
  if (n > m) throw config_error("cell_average target level exceeds source level");
  const std::int64_t shrink = ipow(coarse->spec().base(), m - n);
  std::vector<double> sums(coarse->vertex_count(), 0.0);
  for (std::uint32_t i = 0; i < fine.graph->vertex_count(); ++i) {
    auto lattice = fine.graph->lattice_of(i);
    for (auto& v : lattice) v /= shrink;
    auto idx = coarse->index_of(lattice);
    if (!idx) throw config_error("cell_average: coarse graph does not match spec");
    sums[*idx] += fine.values[i];
  }
  const double scale = static_cast<double>(coarse->vertex_count()) / static_cast<double>(fine.graph->vertex_count());
  for (auto& s : sums) s *= scale;
  return {std::move(coarse), std::move(sums)};
}

CellFunction cell_average_point(const PointFunction& f, std::shared_ptr<const LevelGraph> coarse,
                                int quad_depth) {
  if (quad_depth < 1) throw config_error("quad_depth must be >= 1");
  const auto& spec = coarse->spec();
  const int n = coarse->level();
  std::int64_t nodes = 1;
  for (int i = 0; i < quad_depth; ++i) {
    nodes *= spec.nstar();
    if (nodes > 20'000'000) throw budget_error("quadrature node budget exceeded");
  }
  std::vector<double> vals(coarse->vertex_count());
  std::vector<int> word(static_cast<std::size_t>(n + quad_depth), 0);
  std::vector<double> x;
  for (std::uint32_t w = 0; w < coarse->vertex_count(); ++w) {
    auto cell = cell_of_lattice(spec, n, coarse->lattice_of(w));
    for (int l = 0; l < n; ++l) word[static_cast<std::size_t>(l)] = cell.word[static_cast<std::size_t>(l)];
    std::fill(word.begin() + n, word.end(), 0);
    PairwiseAccumulator acc;
    Address addr;
    addr.depth = n + quad_depth;
    for (std::int64_t q = 0; q < nodes; ++q) {
      addr.word = word;
      acc.add(f(addr.anchor(spec)));
      int l = n + quad_depth - 1;
      while (l >= n && ++word[static_cast<std::size_t>(l)] == spec.nstar()) {
        word[static_cast<std::size_t>(l)] = 0;
        --l;
      }
    }
    vals[w] = acc.total() / static_cast<double>(nodes);
  }
  return {std::move(coarse), std::move(vals)};
}

}  // namespace carpetks
