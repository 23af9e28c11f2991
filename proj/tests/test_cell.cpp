#include <doctest.h>

#include <cmath>
#include <set>

#include "carpetks/measure.hpp"

using namespace carpetks;

TEST_CASE("word and lattice addressing round-trip") {
  auto spec = CarpetSpec::standard_carpet();

  SUBCASE("documented example: word (0,0)(2,2)") {
    Word w;
    w.push_back(*spec.digit_id(std::vector<int>{0, 0}));
    w.push_back(*spec.digit_id(std::vector<int>{2, 2}));
    auto cell = cell_of_word(spec, w);
    CHECK(cell.level == 2);
    CHECK(cell.lattice == std::vector<std::int64_t>{2, 2});
  }

  SUBCASE("empty word is the level-0 cell") {
    auto cell = cell_of_word(spec, {});
    CHECK(cell.level == 0);
    CHECK(cell.lattice == std::vector<std::int64_t>{0, 0});
  }

  SUBCASE("lattice through a hole is rejected") {
    CHECK_THROWS_AS(cell_of_lattice(spec, 2, {4, 4}), Error);
    try {
      cell_of_lattice(spec, 2, {4, 4});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
      CHECK(std::string(e.what()).find("not a cell") != std::string::npos);
    }
  }

  SUBCASE("exhaustive round-trip to level 4") {
    for (int level = 0; level <= 4; ++level) {
      // Enumerate words counting in base N_*.
      Word w(static_cast<std::size_t>(level), 0);
      std::int64_t total = ipow(spec.nstar(), level);
      std::set<std::vector<std::int64_t>> lattices;
      for (std::int64_t i = 0; i < total; ++i) {
        auto cell = cell_of_word(spec, w);
        auto back = cell_of_lattice(spec, level, cell.lattice);
        CHECK(back.word == w);
        lattices.insert(cell.lattice);
        int k = level - 1;
        while (k >= 0 && ++w[static_cast<std::size_t>(k)] == spec.nstar()) {
          w[static_cast<std::size_t>(k)] = 0;
          --k;
        }
      }
      CHECK(static_cast<std::int64_t>(lattices.size()) == total);  // anchors/cells distinct
    }
  }
}

TEST_CASE("anchors lie in the cell box") {
  auto spec = CarpetSpec::standard_carpet();
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Address addr = sample_address(spec, 5, rng);
    auto anchor = addr.anchor(spec);
    auto lattice = lattice_of_word(spec, addr.word);
    for (int k = 0; k < spec.dim(); ++k) {
      const double lo = static_cast<double>(lattice[static_cast<std::size_t>(k)]) / 243.0;
      CHECK(anchor[static_cast<std::size_t>(k)] >= lo - 1e-15);
      CHECK(anchor[static_cast<std::size_t>(k)] <= lo + 1.0 / 243.0 + 1e-15);
    }
  }
}

TEST_CASE("cell measure is exactly N_star^-n and sums to one") {
  auto spec = CarpetSpec::standard_carpet();
  CHECK(cell_measure(spec, 0) == 1.0);
  CHECK(cell_measure(spec, 1) == 1.0 / 8.0);
  CHECK(cell_measure(spec, 3) == 1.0 / 512.0);
  for (int n = 1; n <= 8; ++n) {
    // N_star^n * N_star^-n must round-trip exactly (powers of two).
    CHECK(cell_measure(spec, n) * static_cast<double>(ipow(spec.nstar(), n)) == 1.0);
  }
}

TEST_CASE("sampling is deterministic and uniform") {
  auto spec = CarpetSpec::standard_carpet();

  SUBCASE("same seed, same address") {
    Rng r1(42), r2(42);
    auto a = sample_address(spec, 8, r1);
    auto b = sample_address(spec, 8, r2);
    CHECK(a.word == b.word);
  }

  SUBCASE("level-1 frequencies within 5 sigma of 1/8") {
    Rng rng(123);
    const int draws = 100000;
    std::vector<int> counts(8, 0);
    for (int i = 0; i < draws; ++i)
      ++counts[static_cast<std::size_t>(sample_address(spec, 1, rng).word[0])];
    const double mean = draws / 8.0;
    const double sigma = std::sqrt(draws * (1.0 / 8.0) * (7.0 / 8.0));
    for (int c : counts) CHECK(std::abs(c - mean) < 5.0 * sigma);
  }

  SUBCASE("deeper extension stays within sqrt(D) a^-m") {
    Rng rng(5);
    auto a = sample_address(spec, 6, rng);
    Address b = a;
    Rng rng2(6);
    auto ext = sample_address(spec, 5, rng2);
    b.depth = 11;
    for (int d : ext.word) b.word.push_back(d);
    auto pa = a.anchor(spec), pb = b.anchor(spec);
    double d2 = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double diff = pa[static_cast<std::size_t>(k)] - pb[static_cast<std::size_t>(k)];
      d2 += diff * diff;
    }
    CHECK(std::sqrt(d2) <= std::sqrt(2.0) * std::pow(3.0, -6));
  }
}

TEST_CASE("ball-mass brackets") {
  auto spec = CarpetSpec::standard_carpet();
  Address origin;
  origin.depth = 1;
  origin.word = {*spec.digit_id(std::vector<int>{0, 0})};

  SUBCASE("radius covering K gives the full mass") {
    auto b = measure_ball(spec, origin, Radius::approximate(std::sqrt(2.0) + 1e-9), 2);
    CHECK(b.lower == 1.0);
    CHECK(b.upper == 1.0);
  }

  SUBCASE("documented knife-edge bracket at radius 1/3, level 1") {
    auto b = measure_ball(spec, origin, Radius::rational(1, 3), 1);
    CHECK(b.lower == 0.0);
    CHECK(b.upper == 3.0 / 8.0);
  }

  SUBCASE("level-4 bracket is tight") {
    auto b = measure_ball(spec, origin, Radius::rational(1, 3), 4);
    CHECK(b.upper - b.lower < 0.1);
    CHECK(b.lower > 0.0);
  }

  SUBCASE("brackets nest as the level grows") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      Address c = sample_address(spec, 6, rng);
      const Radius r = Radius::rational(1 + trial, 10);
      for (int level = 1; level < 5; ++level) {
        auto coarse = measure_ball(spec, c, r, level);
        auto fine = measure_ball(spec, c, r, level + 1);
        CHECK(fine.lower >= coarse.lower - 1e-15);
        CHECK(fine.upper <= coarse.upper + 1e-15);
      }
    }
  }

  SUBCASE("box budget is enforced") {
    CHECK_THROWS_AS(measure_ball(spec, origin, Radius::rational(1, 3), 12, 100), Error);
    try {
      measure_ball(spec, origin, Radius::rational(1, 3), 12, 100);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::budget);
    }
  }
}

TEST_CASE("ahlfors scan produces finite positive constants") {
  auto spec = CarpetSpec::standard_carpet();
  std::vector<Radius> radii{Radius::rational(1, 3), Radius::rational(1, 9)};
  auto scan = ahlfors_scan(spec, 50, radii, 5, 11);
  CHECK(scan.c_lower > 0.0);
  CHECK(scan.c_upper >= scan.c_lower);
  CHECK(std::isfinite(scan.c_upper));
  CHECK(scan.rows.size() == 2);

  // Radius 1 at any center: mu(B)/1^alpha = 1.
  Address origin;
  origin.depth = 1;
  origin.word = {*spec.digit_id(std::vector<int>{0, 0})};
  auto b = measure_ball(spec, origin, Radius::rational(3, 2), 3);
  CHECK(b.lower == 1.0);
}
