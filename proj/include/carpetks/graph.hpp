#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "carpetks/cell.hpp"

namespace carpetks {

enum class Side { low, high };

/// Approximation graph G_n = (W_n, E_n). Vertices are all level-n cells in
/// lexicographic lattice order; edges are the box-adjacency relation
/// (Chebyshev distance <= 1 on lattice indices), each unordered pair stored
/// once.
class LevelGraph {
 public:
  LevelGraph(std::shared_ptr<const CarpetSpec> spec, int level,
             std::vector<std::uint64_t> keys, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  const CarpetSpec& spec() const { return *spec_; }
  std::shared_ptr<const CarpetSpec> spec_ptr() const { return spec_; }
  int level() const { return level_; }
  std::size_t vertex_count() const { return keys_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

  std::uint64_t pack(const std::vector<std::int64_t>& lattice) const;
  std::vector<std::int64_t> unpack(std::uint64_t key) const;
  std::vector<std::int64_t> lattice_of(std::uint32_t index) const { return unpack(keys_[index]); }
  std::optional<std::uint32_t> index_of(const std::vector<std::int64_t>& lattice) const;
  std::optional<std::uint32_t> index_of_key(std::uint64_t key) const;

  // CSR neighbor iteration.
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  int degree(std::uint32_t v) const { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }
  int max_degree() const;
  bool connected() const { return connected_; }

 private:
  std::shared_ptr<const CarpetSpec> spec_;
  int level_;
  std::int64_t side_;  // a^n
  std::vector<std::uint64_t> keys_;  // sorted; order is the canonical vertex order
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> adj_;
  bool connected_ = false;
};

/// Builds G_n by lattice-hash neighbor probing: each cell probes its
/// <= 3^D - 1 lattice neighbors. Throws a budget error when N_*^n exceeds
/// `max_vertices`.
std::shared_ptr<const LevelGraph> build_level_graph(std::shared_ptr<const CarpetSpec> spec, int level,
                                                    std::int64_t max_vertices = 8'000'000);

struct LStarEstimate {
  std::vector<int> per_level_max_degree;  // levels 1..n_max
  int l_star = 0;                         // max over scanned levels
  bool stabilized = false;                // last two levels equal
};

LStarEstimate compute_l_star(std::shared_ptr<const CarpetSpec> spec, int n_max);

/// Level-n cells whose box touches the hyperplane x_axis = 0 (low) or 1
/// (high); `axis` is 1-based. Non-empty for a valid GSC.
std::vector<std::uint32_t> face_cells(const LevelGraph& graph, int axis, Side side);

}  // namespace carpetks
