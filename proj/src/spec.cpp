#include "carpetks/spec.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace carpetks {

namespace {

std::string digit_str(std::span<const int> d) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < d.size(); ++k) os << (k ? "," : "") << d[k];
  os << ")";
  return os.str();
}

}  // namespace

CarpetSpec::CarpetSpec(int dim, int base, std::vector<std::vector<int>> digits)
    : dim_(dim), base_(base), digits_(std::move(digits)) {
  if (dim_ < 2) throw config_error("dimension D must be >= 2");
  if (base_ < 3) throw config_error("subdivision factor a must be >= 3");
  if (digits_.empty()) throw config_error("digit set S must be non-empty");
  std::int64_t full = full_count();
  if (full > (std::int64_t{1} << 24)) throw config_error("a^D too large");
  for (const auto& d : digits_) {
    if (static_cast<int>(d.size()) != dim_)
      throw config_error("digit arity mismatch: expected " + std::to_string(dim_) + "-tuples");
    for (int v : d)
      if (v < 0 || v >= base_)
        throw config_error("digit entry out of range [0," + std::to_string(base_ - 1) + "]: " + digit_str(d));
  }
  std::sort(digits_.begin(), digits_.end());
  digits_.erase(std::unique(digits_.begin(), digits_.end()), digits_.end());
  if (static_cast<std::int64_t>(digits_.size()) >= full)
    throw config_error("S must be a proper subset of {0,...,a-1}^D");
  member_table_.assign(static_cast<std::size_t>(full), -1);
  for (std::size_t i = 0; i < digits_.size(); ++i)
    member_table_[static_cast<std::size_t>(pack(digits_[i]))] = static_cast<int>(i);
}

std::int64_t CarpetSpec::pack(std::span<const int> digit) const {
  std::int64_t key = 0;
  for (int k = 0; k < dim_; ++k) key = key * base_ + digit[static_cast<std::size_t>(k)];
  return key;
}

bool CarpetSpec::contains(std::span<const int> digit) const {
  return digit_id(digit).has_value();
}

std::optional<int> CarpetSpec::digit_id(std::span<const int> digit) const {
  for (int v : digit)
    if (v < 0 || v >= base_) return std::nullopt;
  int id = member_table_[static_cast<std::size_t>(pack(digit))];
  if (id < 0) return std::nullopt;
  return id;
}

std::int64_t CarpetSpec::full_count() const {
  std::int64_t full = 1;
  for (int k = 0; k < dim_; ++k) full *= base_;
  return full;
}

CarpetSpec CarpetSpec::standard_carpet() {
  std::vector<std::vector<int>> digits;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!(i == 1 && j == 1)) digits.push_back({i, j});
  return CarpetSpec(2, 3, std::move(digits));
}

CarpetSpec CarpetSpec::menger_sponge() {
  std::vector<std::vector<int>> digits;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        int center = (i == 1) + (j == 1) + (k == 1);
        if (center <= 1) digits.push_back({i, j, k});
      }
  return CarpetSpec(3, 3, std::move(digits));
}

namespace {

// All 2^D * D! isometries of the cube, as (axis permutation, flip mask).
// The image of digit d is d'_k = apply_flip(d[perm[k]]) with flip
// d -> a-1-d on flipped axes.
struct Isometry {
  std::vector<int> perm;
  unsigned flip;
};

std::vector<Isometry> cube_isometries(int dim) {
  std::vector<Isometry> out;
  std::vector<int> perm(static_cast<std::size_t>(dim));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (unsigned flip = 0; flip < (1u << dim); ++flip) out.push_back({perm, flip});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<int> apply_isometry(const Isometry& iso, std::span<const int> d, int base) {
  const int dim = static_cast<int>(d.size());
  std::vector<int> out(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    int v = d[static_cast<std::size_t>(iso.perm[static_cast<std::size_t>(k)])];
    if (iso.flip & (1u << k)) v = base - 1 - v;
    out[static_cast<std::size_t>(k)] = v;
  }
  return out;
}

std::string isometry_str(const Isometry& iso) {
  std::ostringstream os;
  os << "perm(";
  for (std::size_t k = 0; k < iso.perm.size(); ++k) os << (k ? "," : "") << iso.perm[k];
  os << ") flips(";
  bool first = true;
  for (std::size_t k = 0; k < iso.perm.size(); ++k)
    if (iso.flip & (1u << k)) {
      os << (first ? "" : ",") << k;
      first = false;
    }
  os << ")";
  return os.str();
}

ConditionResult check_symmetry(const CarpetSpec& spec) {
  for (const auto& iso : cube_isometries(spec.dim())) {
    for (const auto& d : spec.digits()) {
      auto image = apply_isometry(iso, d, spec.base());
      if (!spec.contains(image))
        return {false, "isometry " + isometry_str(iso) + " maps digit " + digit_str(d) +
                           " to " + digit_str(image) + " outside S"};
    }
  }
  return {true, ""};
}

bool face_adjacent(std::span<const int> u, std::span<const int> v) {
  int diff_axis = -1;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] == v[k]) continue;
    if (std::abs(u[k] - v[k]) != 1 || diff_axis >= 0) return false;
    diff_axis = static_cast<int>(k);
  }
  return diff_axis >= 0;
}

ConditionResult check_connectedness(const CarpetSpec& spec) {
  const int n = spec.nstar();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      if (face_adjacent(spec.digit(u), spec.digit(v))) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  if (count == n) return {true, ""};
  std::ostringstream os;
  os << "Int(Q_1) splits; component of " << digit_str(spec.digit(0)) << " misses";
  for (int v = 0; v < n; ++v)
    if (!seen[static_cast<std::size_t>(v)]) {
      os << " " << digit_str(spec.digit(v));
      break;
    }
  return {false, os.str()};
}

ConditionResult check_non_diagonality(const CarpetSpec& spec) {
  const int dim = spec.dim();
  const int base = spec.base();
  // Window base in {0,...,a-2}^D; window cells are base + offsets in {0,1}^D.
  std::vector<int> window(static_cast<std::size_t>(dim), 0);
  for (;;) {
    std::vector<std::vector<int>> present;
    for (unsigned off = 0; off < (1u << dim); ++off) {
      std::vector<int> cell(static_cast<std::size_t>(dim));
      for (int k = 0; k < dim; ++k)
        cell[static_cast<std::size_t>(k)] = window[static_cast<std::size_t>(k)] + ((off >> k) & 1);
      if (spec.contains(cell)) present.push_back(std::move(cell));
    }
    if (!present.empty()) {
      // Interior of the union of closed unit boxes is connected iff the
      // boxes are face-connected.
      std::vector<char> seen(present.size(), 0);
      std::vector<std::size_t> stack{0};
      seen[0] = 1;
      std::size_t count = 1;
      while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < present.size(); ++v) {
          if (seen[v]) continue;
          if (face_adjacent(present[u], present[v])) {
            seen[v] = 1;
            ++count;
            stack.push_back(v);
          }
        }
      }
      if (count != present.size())
        return {false, "window anchored at " + digit_str(window) + " has disconnected interior"};
    }
    int k = 0;
    while (k < dim && ++window[static_cast<std::size_t>(k)] > base - 2) {
      window[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == dim) break;
  }
  return {true, ""};
}

ConditionResult check_borders(const CarpetSpec& spec) {
  std::vector<int> d(static_cast<std::size_t>(spec.dim()), 0);
  for (int t = 0; t < spec.base(); ++t) {
    d[0] = t;
    if (!spec.contains(d)) return {false, "missing bottom-edge digit " + digit_str(d)};
  }
  return {true, ""};
}

}  // namespace

ValidationReport validate_carpet(const CarpetSpec& spec) {
  ValidationReport rep;
  rep.symmetry = check_symmetry(spec);
  rep.connectedness = check_connectedness(spec);
  rep.non_diagonality = check_non_diagonality(spec);
  rep.borders = check_borders(spec);
  return rep;
}

}  // namespace carpetks
