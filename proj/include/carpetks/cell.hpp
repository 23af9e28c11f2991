#pragma once

#include <cstdint>
#include <vector>

#include "carpetks/spec.hpp"

namespace carpetks {

using Word = std::vector<int>;  // digit ids into CarpetSpec::digits()

/// A level-n cell, addressed both by its word and by the lattice index of
/// its box prod_k [i_k/a^n, (i_k+1)/a^n].
struct Cell {
  int level = 0;
  std::vector<std::int64_t> lattice;
  Word word;
};

/// A finite truncation of an infinite word: the point F_w(0), which lies in
/// K because all cube corners are in Q_1 at every level.
struct Address {
  int depth = 0;
  Word word;

  /// Anchor coordinates sum_k digit_k a^{-k}.
  std::vector<double> anchor(const CarpetSpec& spec) const;

  /// Anchor numerators at denominator a^scale_level (scale_level >= depth).
  std::vector<std::int64_t> anchor_scaled(const CarpetSpec& spec, int scale_level) const;
};

std::int64_t ipow(std::int64_t base, int exp);

Cell cell_of_word(const CarpetSpec& spec, const Word& word);

/// Decodes a lattice index back into digits; throws a config error if any
/// digit leaves S ("not a cell").
Cell cell_of_lattice(const CarpetSpec& spec, int level, const std::vector<std::int64_t>& lattice);

std::vector<std::int64_t> lattice_of_word(const CarpetSpec& spec, const Word& word);

}  // namespace carpetks
