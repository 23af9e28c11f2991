#include <doctest.h>

#include <algorithm>
#include <set>

#include "carpetks/graph.hpp"

using namespace carpetks;

namespace {

// O(N^2) brute-force edge oracle straight from the box-intersection rule.
std::set<std::pair<std::uint32_t, std::uint32_t>> brute_force_edges(const LevelGraph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  const auto n = static_cast<std::uint32_t>(g.vertex_count());
  for (std::uint32_t u = 0; u < n; ++u) {
    auto lu = g.lattice_of(u);
    for (std::uint32_t v = u + 1; v < n; ++v) {
      auto lv = g.lattice_of(v);
      std::int64_t cheb = 0;
      for (std::size_t k = 0; k < lu.size(); ++k)
        cheb = std::max(cheb, std::abs(lu[k] - lv[k]));
      if (cheb <= 1) out.insert({u, v});
    }
  }
  return out;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const LevelGraph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (auto [u, v] : g.edges()) out.insert({std::min(u, v), std::max(u, v)});
  return out;
}

}  // namespace

TEST_CASE("level-1 standard carpet graph") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto g = build_level_graph(spec, 1);
  CHECK(g->vertex_count() == 8);
  CHECK(g->edge_count() == 12);
  CHECK(g->max_degree() == 4);
  CHECK(g->connected());
}

TEST_CASE("level-0 graph is a single vertex") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto g = build_level_graph(spec, 0);
  CHECK(g->vertex_count() == 1);
  CHECK(g->edge_count() == 0);
  CHECK(g->connected());
}

TEST_CASE("edges match the brute-force oracle") {
  auto sc = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  for (int n = 1; n <= 3; ++n) {
    auto g = build_level_graph(sc, n);
    CHECK(edge_set(*g) == brute_force_edges(*g));
    CHECK(g->connected());
    for (std::uint32_t v = 0; v < g->vertex_count(); ++v) CHECK(g->degree(v) <= 8);
  }
  auto ms = std::make_shared<CarpetSpec>(CarpetSpec::menger_sponge());
  for (int n = 1; n <= 2; ++n) {
    auto g = build_level_graph(ms, n);
    CHECK(edge_set(*g) == brute_force_edges(*g));
    CHECK(g->connected());
    for (std::uint32_t v = 0; v < g->vertex_count(); ++v) CHECK(g->degree(v) <= 26);
  }
}

TEST_CASE("edge endpoints have equal or adjacent parents") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  for (int n = 2; n <= 4; ++n) {
    auto g = build_level_graph(spec, n);
    auto parent = build_level_graph(spec, n - 1);
    for (auto [u, v] : g->edges()) {
      auto lu = g->lattice_of(u), lv = g->lattice_of(v);
      for (auto& x : lu) x /= 3;
      for (auto& x : lv) x /= 3;
      std::int64_t cheb = 0;
      for (std::size_t k = 0; k < lu.size(); ++k)
        cheb = std::max(cheb, std::abs(lu[k] - lv[k]));
      CHECK(cheb <= 1);  // same parent or box-adjacent parents
      CHECK(parent->index_of(lu).has_value());
      CHECK(parent->index_of(lv).has_value());
    }
  }
}

TEST_CASE("max degree statistics") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto est = compute_l_star(spec, 3);
  CHECK(est.per_level_max_degree.size() == 3);
  CHECK(est.per_level_max_degree[0] == 4);
  CHECK(est.l_star <= 8);
  // Non-decreasing over the scanned levels.
  CHECK(std::is_sorted(est.per_level_max_degree.begin(), est.per_level_max_degree.end()));
}

TEST_CASE("face cells") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto g = build_level_graph(spec, 1);
  auto low = face_cells(*g, 1, Side::low);
  auto high = face_cells(*g, 1, Side::high);
  CHECK(low.size() == 3);
  CHECK(high.size() == 3);
  for (auto v : low) CHECK(g->lattice_of(v)[0] == 0);
  for (auto v : high) CHECK(g->lattice_of(v)[0] == 2);
  std::set<std::uint32_t> l(low.begin(), low.end()), h(high.begin(), high.end());
  for (auto v : l) CHECK_FALSE(h.count(v));
  CHECK_THROWS_AS(face_cells(*g, 3, Side::low), Error);
}

TEST_CASE("vertex budget is enforced") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  CHECK_THROWS_AS(build_level_graph(spec, 5, 1000), Error);
  try {
    build_level_graph(spec, 5, 1000);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::budget);
  }
}
