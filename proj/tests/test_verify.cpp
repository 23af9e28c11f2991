#include <doctest.h>

#include <cmath>

#include "carpetks/verify.hpp"

using namespace carpetks;

namespace {

VerifyConfig small_cfg() {
  VerifyConfig cfg;
  cfg.n_lo = 2;
  cfg.n_hi = 3;
  cfg.member_level = 5;
  cfg.rho_level_lo = 2;
  cfg.annuli_J = 3;
  cfg.quad_depth = 3;
  cfg.samples = 20000;
  return cfg;
}

void check_report(const InequalityReport& r, std::size_t levels) {
  CHECK(r.levels.size() == levels);
  CHECK(r.left.size() == levels);
  CHECK(r.right.size() == levels);
  for (double v : r.left) CHECK(std::isfinite(v));
  for (double v : r.right) CHECK(std::isfinite(v));
  if (!r.trivial) {
    CHECK(r.c_hat > 0.0);
    CHECK(std::isfinite(r.c_hat));
  }
  CHECK_FALSE(r.id.empty());
}

}  // namespace

TEST_CASE("quantity tables on a coarse member") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto cfg = small_cfg();
  auto consts = GeometryConstants::make(*spec, 2.0, 2.09);

  SUBCASE("exact piecewise constant uses the exact deficit path") {
    auto g1 = build_level_graph(spec, 1);
    std::vector<double> v(g1->vertex_count(), 0.0);
    v[0] = 1.0;
    auto f = EvalFunction::from_cells(CellFunction{g1, v}, "indicator", true);
    auto t = compute_tables(spec, f, consts, cfg, 1);
    CHECK(t.deficit_exact);
    REQUIRE(t.levels.size() == 2);
    // Averaging at or below the function's own level loses nothing.
    for (double d : t.deficit) CHECK(d == 0.0);
    for (double e : t.e_tilde) CHECK(e > 0.0);
  }

  SUBCASE("coordinate probe produces finite positive tables") {
    auto f = EvalFunction::coordinate(1);
    auto t = compute_tables(spec, f, consts, cfg, 1);
    for (double a : t.a_func) {
      CHECK(a > 0.0);
      CHECK(std::isfinite(a));
    }
    for (double d : t.deficit) CHECK(d > 0.0);
    CHECK(t.annuli_raw.size() == t.levels.size());
    for (const auto& row : t.annuli_raw) CHECK(row.size() == static_cast<std::size_t>(cfg.annuli_J + 1));
  }
}

TEST_CASE("individual verifiers on the coordinate probe") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto cfg = small_cfg();
  auto consts = GeometryConstants::make(*spec, 2.0, 2.09);
  auto f = EvalFunction::coordinate(1);

  auto wm = verify_weak_monotonicity(spec, f, consts, cfg);
  check_report(wm, 2);
  auto thm = verify_theorem_main(spec, f, consts, cfg);
  check_report(thm, 2);

  auto k = min_k(2.0, spec->base(), consts.alpha, consts.beta);
  auto props = verify_propositions(spec, f, consts, k, cfg);
  for (const auto* r : {&props.prop1, &props.prop2, &props.prop3, &props.eq_splice})
    check_report(*r, 2);
  check_report(props.prop4, 1);     // single liminf-surrogate comparison
  check_report(props.lemma_pi, 1);  // needs levels l > n, so one row fewer
  CHECK(props.prop2.tail_fraction >= 0.0);
  CHECK(props.prop2.tail_fraction < 1.0);
}

TEST_CASE("constants give trivial reports") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto cfg = small_cfg();
  auto consts = GeometryConstants::make(*spec, 2.0, 2.09);
  auto one = EvalFunction::analytic([](std::span<const double>) { return 4.0; }, "const");
  auto wm = verify_weak_monotonicity(spec, one, consts, cfg);
  CHECK(wm.trivial);
  for (double v : wm.left) CHECK(v == 0.0);
}

TEST_CASE("configuration guards") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto cfg = small_cfg();
  cfg.n_lo = 4;
  cfg.n_hi = 2;
  auto consts = GeometryConstants::make(*spec, 2.0, 2.09);
  CHECK_THROWS_AS(verify_weak_monotonicity(spec, EvalFunction::coordinate(1), consts, cfg), Error);
}

TEST_CASE("small full suite run") {
  auto spec = std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet());
  auto cfg = small_cfg();
  auto bundle = run_suite(spec, cfg);
  CHECK(bundle.suite.rho.supercritical);
  CHECK(bundle.suite.consts.beta > bundle.suite.consts.alpha);
  CHECK(bundle.suite.members.size() == 5);
  // 8 inequality checks per suite member.
  CHECK(bundle.reports.size() == bundle.suite.members.size() * 8);
  int negative = 0;
  for (const auto& m : bundle.suite.members)
    if (m.role == MemberRole::negative_control) ++negative;
  CHECK(negative == 1);
  for (const auto& r : bundle.reports) {
    CHECK_FALSE(r.function.empty());
    CHECK(r.seed == cfg.seed);
    for (double v : r.left) CHECK(std::isfinite(v));
  }
}
