#include "carpetks/graph.hpp"

#include <algorithm>
#include <numeric>

namespace carpetks {

LevelGraph::LevelGraph(std::shared_ptr<const CarpetSpec> spec, int level,
                       std::vector<std::uint64_t> keys,
                       std::vector<std::pair<std::uint32_t, std::uint32_t>> edges)
    : spec_(std::move(spec)), level_(level), side_(ipow(spec_->base(), level)),
      keys_(std::move(keys)), edges_(std::move(edges)) {
  const std::size_t n = keys_.size();
  offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges_) {
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  adj_.resize(offsets_[n]);
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [u, v] : edges_) {
    adj_[fill[u]++] = v;
    adj_[fill[v]++] = u;
  }
  // Union-find connectivity.
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& [u, v] : edges_) {
    auto ru = find(u), rv = find(v);
    if (ru != rv) {
      parent[ru] = rv;
      --components;
    }
  }
  connected_ = (components <= 1);
}

std::uint64_t LevelGraph::pack(const std::vector<std::int64_t>& lattice) const {
  std::uint64_t key = 0;
  for (auto v : lattice) key = key * static_cast<std::uint64_t>(side_) + static_cast<std::uint64_t>(v);
  return key;
}

std::vector<std::int64_t> LevelGraph::unpack(std::uint64_t key) const {
  std::vector<std::int64_t> lattice(static_cast<std::size_t>(spec_->dim()));
  for (int k = spec_->dim() - 1; k >= 0; --k) {
    lattice[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(side_));
    key /= static_cast<std::uint64_t>(side_);
  }
  return lattice;
}

std::optional<std::uint32_t> LevelGraph::index_of(const std::vector<std::int64_t>& lattice) const {
  for (auto v : lattice)
    if (v < 0 || v >= side_) return std::nullopt;
  return index_of_key(pack(lattice));
}

std::optional<std::uint32_t> LevelGraph::index_of_key(std::uint64_t key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::uint32_t>(it - keys_.begin());
}

int LevelGraph::max_degree() const {
  int d = 0;
  for (std::size_t v = 0; v < vertex_count(); ++v)
    d = std::max(d, degree(static_cast<std::uint32_t>(v)));
  return d;
}

std::shared_ptr<const LevelGraph> build_level_graph(std::shared_ptr<const CarpetSpec> spec, int level,
                                                    std::int64_t max_vertices) {
  if (level < 0) throw config_error("graph level must be >= 0");
  std::int64_t count = 1;
  for (int i = 0; i < level; ++i) {
    count *= spec->nstar();
    if (count > max_vertices)
      throw budget_error("level " + std::to_string(level) + " graph exceeds vertex budget");
  }
  const int dim = spec->dim();
  const std::int64_t side = ipow(spec->base(), level);

  // Enumerate W_n level by level as flat lattice tuples, then sort by key.
  std::vector<std::int64_t> lattices(static_cast<std::size_t>(dim), 0);
  for (int l = 0; l < level; ++l) {
    const std::size_t cur = lattices.size() / static_cast<std::size_t>(dim);
    std::vector<std::int64_t> next;
    next.reserve(cur * static_cast<std::size_t>(spec->nstar()) * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < cur; ++i) {
      for (int id = 0; id < spec->nstar(); ++id) {
        const auto& d = spec->digit(id);
        for (int k = 0; k < dim; ++k)
          next.push_back(lattices[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] * spec->base() +
                         d[static_cast<std::size_t>(k)]);
      }
    }
    lattices = std::move(next);
  }
  const std::size_t n = lattices.size() / static_cast<std::size_t>(dim);
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t key = 0;
    for (int k = 0; k < dim; ++k)
      key = key * static_cast<std::uint64_t>(side) +
            static_cast<std::uint64_t>(lattices[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)]);
    keys[i] = key;
  }
  std::sort(keys.begin(), keys.end());

  // Neighbor probing over the 3^D - 1 lattice offsets; only offsets that are
  // lexicographically positive, so each unordered edge is found once.
  std::vector<std::vector<std::int64_t>> offsets;
  {
    std::vector<std::int64_t> off(static_cast<std::size_t>(dim), -1);
    for (;;) {
      bool positive = false;
      for (int k = 0; k < dim; ++k) {
        if (off[static_cast<std::size_t>(k)] > 0) { positive = true; break; }
        if (off[static_cast<std::size_t>(k)] < 0) break;
      }
      if (positive) offsets.push_back(off);
      int k = dim - 1;
      while (k >= 0 && ++off[static_cast<std::size_t>(k)] > 1) {
        off[static_cast<std::size_t>(k)] = -1;
        --k;
      }
      if (k < 0) break;
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::int64_t> lat(static_cast<std::size_t>(dim)), nb(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    // unpack
    std::uint64_t key = keys[i];
    for (int k = dim - 1; k >= 0; --k) {
      lat[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(side));
      key /= static_cast<std::uint64_t>(side);
    }
    for (const auto& off : offsets) {
      bool in_range = true;
      std::uint64_t nb_key = 0;
      for (int k = 0; k < dim; ++k) {
        const std::int64_t v = lat[static_cast<std::size_t>(k)] + off[static_cast<std::size_t>(k)];
        if (v < 0 || v >= side) { in_range = false; break; }
        nb_key = nb_key * static_cast<std::uint64_t>(side) + static_cast<std::uint64_t>(v);
      }
      if (!in_range) continue;
      auto it = std::lower_bound(keys.begin(), keys.end(), nb_key);
      if (it != keys.end() && *it == nb_key)
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(it - keys.begin()));
    }
  }
  for (auto& [u, v] : edges)
    if (u > v) std::swap(u, v);
  std::sort(edges.begin(), edges.end());

  return std::make_shared<LevelGraph>(std::move(spec), level, std::move(keys), std::move(edges));
}

LStarEstimate compute_l_star(std::shared_ptr<const CarpetSpec> spec, int n_max) {
  if (n_max < 1) throw config_error("n_max must be >= 1");
  LStarEstimate est;
  for (int n = 1; n <= n_max; ++n) {
    auto g = build_level_graph(spec, n);
    est.per_level_max_degree.push_back(g->max_degree());
    est.l_star = std::max(est.l_star, g->max_degree());
  }
  const auto& d = est.per_level_max_degree;
  est.stabilized = d.size() >= 2 && d[d.size() - 1] == d[d.size() - 2];
  return est;
}

std::vector<std::uint32_t> face_cells(const LevelGraph& graph, int axis, Side side) {
  const int dim = graph.spec().dim();
  if (axis < 1 || axis > dim) throw config_error("axis must be in [1," + std::to_string(dim) + "]");
  const std::int64_t target = side == Side::low ? 0 : ipow(graph.spec().base(), graph.level()) - 1;
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < graph.vertex_count(); ++v)
    if (graph.lattice_of(v)[static_cast<std::size_t>(axis - 1)] == target) out.push_back(v);
  return out;
}

}  // namespace carpetks
