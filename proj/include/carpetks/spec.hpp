#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carpetks/error.hpp"

namespace carpetks {

/// The triple (D, a, S) defining GSC(D, a, S).
///
/// Digits are stored sorted lexicographically; all word machinery addresses
/// them by index into `digits`.
class CarpetSpec {
 public:
  CarpetSpec(int dim, int base, std::vector<std::vector<int>> digits);

  int dim() const { return dim_; }
  int base() const { return base_; }
  int nstar() const { return static_cast<int>(digits_.size()); }
  double alpha() const { return std::log(static_cast<double>(nstar())) / std::log(static_cast<double>(base_)); }

  const std::vector<std::vector<int>>& digits() const { return digits_; }
  const std::vector<int>& digit(int id) const { return digits_[static_cast<std::size_t>(id)]; }

  bool contains(std::span<const int> digit) const;
  // Index into digits() or nullopt.
  std::optional<int> digit_id(std::span<const int> digit) const;

  // Full digit-set size a^D.
  std::int64_t full_count() const;

  static CarpetSpec standard_carpet();
  static CarpetSpec menger_sponge();

 private:
  int dim_;
  int base_;
  std::vector<std::vector<int>> digits_;
  std::vector<int> member_table_;  // size a^D, -1 or digit id
  std::int64_t pack(std::span<const int> digit) const;
};

/// One GSC condition outcome with a human-readable witness on failure.
struct ConditionResult {
  bool pass = false;
  std::string witness;  // empty when pass
};

struct ValidationReport {
  ConditionResult symmetry;
  ConditionResult connectedness;
  ConditionResult non_diagonality;
  ConditionResult borders;
  bool valid() const {
    return symmetry.pass && connectedness.pass && non_diagonality.pass && borders.pass;
  }
};

/// Checks the four GSC conditions. Symmetry enumerates the hyperoctahedral
/// group as signed axis permutations acting on digit vectors; connectedness
/// uses shared-(D-1)-face adjacency of the open sub-cubes; non-diagonality
/// scans every 2^D block window; borders checks the bottom edge digits.
/// Rejects S empty or S equal to the full digit set.
ValidationReport validate_carpet(const CarpetSpec& spec);

}  // namespace carpetks
