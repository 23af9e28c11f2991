#include "carpetks/cell.hpp"

#include <sstream>

namespace carpetks {

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (std::int64_t{1} << 62) / base) throw budget_error("integer scale overflow");
    r *= base;
  }
  return r;
}

std::vector<double> Address::anchor(const CarpetSpec& spec) const {
  std::vector<double> x(static_cast<std::size_t>(spec.dim()), 0.0);
  double scale = 1.0;
  for (int m = 0; m < depth; ++m) {
    scale /= spec.base();
    const auto& d = spec.digit(word[static_cast<std::size_t>(m)]);
    for (int k = 0; k < spec.dim(); ++k) x[static_cast<std::size_t>(k)] += d[static_cast<std::size_t>(k)] * scale;
  }
  return x;
}

std::vector<std::int64_t> Address::anchor_scaled(const CarpetSpec& spec, int scale_level) const {
  if (scale_level < depth) throw config_error("anchor scale level below address depth");
  std::vector<std::int64_t> x(static_cast<std::size_t>(spec.dim()), 0);
  for (int m = 0; m < depth; ++m) {
    const auto& d = spec.digit(word[static_cast<std::size_t>(m)]);
    for (int k = 0; k < spec.dim(); ++k)
      x[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] * spec.base() + d[static_cast<std::size_t>(k)];
  }
  std::int64_t rest = ipow(spec.base(), scale_level - depth);
  for (auto& v : x) v *= rest;
  return x;
}

std::vector<std::int64_t> lattice_of_word(const CarpetSpec& spec, const Word& word) {
  std::vector<std::int64_t> lattice(static_cast<std::size_t>(spec.dim()), 0);
  for (int id : word) {
    if (id < 0 || id >= spec.nstar()) throw config_error("digit id out of range");
    const auto& d = spec.digit(id);
    for (int k = 0; k < spec.dim(); ++k)
      lattice[static_cast<std::size_t>(k)] = lattice[static_cast<std::size_t>(k)] * spec.base() + d[static_cast<std::size_t>(k)];
  }
  return lattice;
}

Cell cell_of_word(const CarpetSpec& spec, const Word& word) {
  Cell c;
  c.level = static_cast<int>(word.size());
  c.word = word;
  c.lattice = lattice_of_word(spec, word);
  return c;
}

Cell cell_of_lattice(const CarpetSpec& spec, int level, const std::vector<std::int64_t>& lattice) {
  if (level < 0) throw config_error("level must be >= 0");
  if (static_cast<int>(lattice.size()) != spec.dim()) throw config_error("lattice arity mismatch");
  const std::int64_t limit = ipow(spec.base(), level);
  for (auto v : lattice)
    if (v < 0 || v >= limit) throw config_error("lattice index out of range for level " + std::to_string(level));
  Cell c;
  c.level = level;
  c.lattice = lattice;
  c.word.resize(static_cast<std::size_t>(level));
  std::vector<std::int64_t> rem = lattice;
  std::int64_t scale = limit / (level > 0 ? spec.base() : 1);
  std::vector<int> digit(static_cast<std::size_t>(spec.dim()));
  for (int m = 0; m < level; ++m) {
    for (int k = 0; k < spec.dim(); ++k) {
      digit[static_cast<std::size_t>(k)] = static_cast<int>(rem[static_cast<std::size_t>(k)] / scale);
      rem[static_cast<std::size_t>(k)] %= scale;
    }
    auto id = spec.digit_id(digit);
    if (!id) {
      std::ostringstream os;
      os << "not a cell: level-" << (m + 1) << " digit (";
      for (int k = 0; k < spec.dim(); ++k) os << (k ? "," : "") << digit[static_cast<std::size_t>(k)];
      os << ") is not in S";
      throw config_error(os.str());
    }
    c.word[static_cast<std::size_t>(m)] = *id;
    scale /= spec.base();
    if (scale == 0) scale = 1;
  }
  return c;
}

}  // namespace carpetks
