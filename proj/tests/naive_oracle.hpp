#pragma once

// Definition-oracle for carpet validation, deliberately written from the
// geometric definition rather than the library's algorithms: symmetry via
// group generators, interior connectivity via half-cell pixel rasterization,
// borders directly. Slow and simple on purpose.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace naive {

using Digit = std::vector<int>;
using DigitSet = std::set<Digit>;

// The hyperoctahedral group is generated by adjacent-axis swaps and per-axis
// reflections; a set is invariant under the group iff it is invariant under
// every generator.
inline bool symmetric(const DigitSet& s, int dim, int base) {
  for (int k = 0; k + 1 < dim; ++k) {
    DigitSet image;
    for (auto d : s) {
      std::swap(d[static_cast<std::size_t>(k)], d[static_cast<std::size_t>(k + 1)]);
      image.insert(std::move(d));
    }
    if (image != s) return false;
  }
  for (int k = 0; k < dim; ++k) {
    DigitSet image;
    for (auto d : s) {
      d[static_cast<std::size_t>(k)] = base - 1 - d[static_cast<std::size_t>(k)];
      image.insert(std::move(d));
    }
    if (image != s) return false;
  }
  return true;
}

// Rasterizes each unit box into 2^dim half-size pixels and BFS-es over
// pixel faces; the interior of the union of closed boxes is connected iff
// the pixel set is one face-connected component.
inline bool interior_connected(const std::vector<Digit>& cells, int dim) {
  if (cells.empty()) return true;
  std::set<Digit> pixels;
  std::vector<int> off(static_cast<std::size_t>(dim), 0);
  for (const auto& c : cells) {
    for (unsigned m = 0; m < (1u << dim); ++m) {
      Digit p(static_cast<std::size_t>(dim));
      for (int k = 0; k < dim; ++k)
        p[static_cast<std::size_t>(k)] = 2 * c[static_cast<std::size_t>(k)] + ((m >> k) & 1);
      pixels.insert(std::move(p));
    }
  }
  std::set<Digit> seen;
  std::vector<Digit> stack{*pixels.begin()};
  seen.insert(*pixels.begin());
  while (!stack.empty()) {
    Digit p = stack.back();
    stack.pop_back();
    for (int k = 0; k < dim; ++k)
      for (int dir : {-1, 1}) {
        Digit q = p;
        q[static_cast<std::size_t>(k)] += dir;
        if (pixels.count(q) && !seen.count(q)) {
          seen.insert(q);
          stack.push_back(q);
        }
      }
  }
  return seen.size() == pixels.size();
}

inline bool connected(const DigitSet& s, int dim) {
  return interior_connected({s.begin(), s.end()}, dim);
}

inline bool non_diagonal(const DigitSet& s, int dim, int base) {
  std::vector<int> anchor(static_cast<std::size_t>(dim), 0);
  for (;;) {
    std::vector<Digit> present;
    for (unsigned m = 0; m < (1u << dim); ++m) {
      Digit c(static_cast<std::size_t>(dim));
      for (int k = 0; k < dim; ++k)
        c[static_cast<std::size_t>(k)] = anchor[static_cast<std::size_t>(k)] + ((m >> k) & 1);
      if (s.count(c)) present.push_back(std::move(c));
    }
    if (!interior_connected(present, dim)) return false;
    int k = 0;
    while (k < dim && ++anchor[static_cast<std::size_t>(k)] > base - 2) {
      anchor[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == dim) break;
  }
  return true;
}

inline bool borders(const DigitSet& s, int dim, int base) {
  for (int t = 0; t < base; ++t) {
    Digit d(static_cast<std::size_t>(dim), 0);
    d[0] = t;
    if (!s.count(d)) return false;
  }
  return true;
}

inline bool valid(const DigitSet& s, int dim, int base) {
  std::int64_t full = 1;
  for (int k = 0; k < dim; ++k) full *= base;
  if (s.empty() || static_cast<std::int64_t>(s.size()) >= full) return false;
  return symmetric(s, dim, base) && connected(s, dim) && non_diagonal(s, dim, base) &&
         borders(s, dim, base);
}

}  // namespace naive
