#pragma once

#include <cmath>
#include <cstdint>

#include "carpetks/error.hpp"

namespace carpetks {

// A ball radius, exact-rational when possible so that knife-edge
// box-vs-sphere comparisons (e.g. r = 1/3 against a lattice corner) are
// decided without floating-point ties.
struct Radius {
  bool exact = false;
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value = 0.0;

  static Radius rational(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) throw config_error("radius must be a nonnegative rational");
    Radius r;
    r.exact = true;
    r.num = num;
    r.den = den;
    r.value = static_cast<double>(num) / static_cast<double>(den);
    return r;
  }

  static Radius approximate(double v) {
    if (!(v >= 0.0)) throw config_error("radius must be nonnegative");
    Radius r;
    r.exact = false;
    r.value = v;
    return r;
  }

  // Compares dist2 / scale^2 <= r^2 where dist2 is an integer squared
  // distance at integer scale `scale`. Exact in __int128 for rational radii.
  bool covers_sq(std::int64_t dist2, std::int64_t scale) const {
    if (exact) {
      __int128 lhs = static_cast<__int128>(dist2) * den * den;
      __int128 rhs = static_cast<__int128>(num) * num * scale * scale;
      return lhs <= rhs;
    }
    long double lhs = static_cast<long double>(dist2);
    long double rv = static_cast<long double>(value) * static_cast<long double>(scale);
    return lhs <= rv * rv;
  }
};

}  // namespace carpetks
