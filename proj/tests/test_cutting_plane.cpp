#include <cmath>

#include "doctest.h"
#include "qso/cutting_plane.hpp"

using namespace qso;

TEST_CASE("one-dimensional localizer bisects") {
  CuttingPlaneEngine engine(1, 1.0);
  CHECK(engine.center()[0] == 0.0);
  Vec dir(1);
  dir << 1.0;
  engine.cut(dir);  // discard {z > 0}
  CHECK(engine.center()[0] == doctest::Approx(-0.5));
  CHECK(engine.volume_ratio() == doctest::Approx(0.5));
  Vec neg(1);
  neg << -1.0;
  engine.cut(neg);  // discard {z < -0.5}
  CHECK(engine.center()[0] == doctest::Approx(-0.25));
  CHECK(engine.volume_ratio() == doctest::Approx(0.25));
}

TEST_CASE("ellipsoid volume shrinks at least by the guaranteed factor") {
  CuttingPlaneEngine engine(2, 1.0);
  const double factor = engine.volume_factor();
  CHECK(factor == doctest::Approx(std::exp(-1.0 / 6.0)));
  // the exact central-cut determinant ratio, from the rank-one update
  const double n = 2.0;
  const double exact = std::pow(n * n / (n * n - 1.0), n / 2.0) *
                       std::sqrt((n - 1.0) / (n + 1.0));
  CHECK(exact < factor);
  Rng rng(1);
  for (int k = 1; k <= 25; ++k) {
    engine.cut(rng.unit_vec(2));
    CHECK(engine.volume_ratio() ==
          doctest::Approx(std::pow(exact, k)).epsilon(1e-9));
    CHECK(engine.volume_ratio() <= std::pow(factor, k));
    CHECK(std::isfinite(engine.center().norm()));
  }
}

TEST_CASE("cutting toward a target point homes in on it") {
  Vec p(2);
  p << 0.4, -0.3;
  CuttingPlaneEngine engine(2, 1.0);
  for (int k = 0; k < 60; ++k) {
    Vec dir = engine.center() - p;
    if (dir.norm() < 1e-9) break;
    engine.cut(dir);  // keep the half-space containing p
  }
  CHECK((engine.center() - p).norm() < 0.05);
}

TEST_CASE("degenerate directions are rejected") {
  CuttingPlaneEngine engine(2, 1.0);
  CHECK_THROWS_AS((void)engine.cut(Vec::Zero(2)), numeric_degeneracy);
}

TEST_CASE("cut budget follows the volume argument") {
  // ceil(2 (d+1) d ln(outer / r_k)) + 1
  CHECK(scp_cut_budget(2, 2.0, 0.05) ==
        static_cast<std::uint64_t>(std::ceil(12.0 * std::log(40.0))) + 1);
  CHECK(scp_cut_budget(1, 1.0, 2.0) == 1);  // target ball already covers
  CHECK(scp_cut_budget(3, 1.0, 1.0) == 1);
}

TEST_CASE("trivial accuracy yields the single origin candidate") {
  Rng rng(2);
  auto prob = make_fixture("ball-distance", 2, FixtureParams{}, rng);
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  const auto out = run_scp_candidates(prob, 2.0, backend, rng, ledger);
  REQUIRE(out.points.size() == 1);
  CHECK(out.points[0].norm() == 0.0);
  CHECK_FALSE(out.degraded);
  CHECK(ledger.quantum_queries_charged() == 0);
}

TEST_CASE("candidate generation stays feasible and finds a near-optimal point") {
  Rng rng(3);
  auto prob = make_fixture("ball-distance", 2, FixtureParams{}, rng);
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  const double eps = 0.15;
  const auto out = run_scp_candidates(prob, eps, backend, rng, ledger);
  REQUIRE(!out.points.empty());
  CHECK_FALSE(out.degraded);
  CHECK(out.cuts <= scp_cut_budget(2, 2.0 * prob.radius,
                                   eps / (2.0 * prob.lipschitz)));
  double best = 1e9;
  for (const auto& pt : out.points) {
    CHECK(pt.norm() <= 2.0 * prob.radius + 1e-9);
    best = std::min(best, prob.objective(pt) - *prob.optimum_value);
  }
  CHECK(best <= eps);
  CHECK(ledger.quantum_queries_charged() > 0);
}
