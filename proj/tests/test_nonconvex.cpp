#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qso/nonconvex.hpp"

using namespace qso;

namespace {

ProblemInstance quadratic(Rng& rng, Eigen::Index d, double shift,
                          double noise = 1.0) {
  FixtureParams p;
  p.extra["shift"] = shift;
  p.extra["noise"] = noise;
  return make_fixture("quadratic-noisy", d, p, rng);
}

}  // namespace

TEST_CASE("qsgd stops at a uniform index inside the budget") {
  Rng rng(11);
  auto prob = quadratic(rng, 4, 1.0);  // gap 1/2, smoothness 1
  const MeanEstimationBackend backend{};
  const double eps = 0.5;  // budget ceil(12 * 0.5 / 0.25) = 24
  std::vector<std::uint64_t> steps;
  for (int i = 0; i < 200; ++i) {
    QueryLedger ledger;
    const auto res = run_qsgd(prob, eps, backend, rng, ledger);
    REQUIRE(res.steps >= 1);
    REQUIRE(res.steps <= 24);
    CHECK(ledger.quantum_queries_charged() > 0);
    CHECK(res.x.norm() < 3.0);
    steps.push_back(res.steps);
  }
  CHECK(*std::max_element(steps.begin(), steps.end()) >= 20);
  double mean = 0.0;
  for (auto s : steps) mean += static_cast<double>(s);
  mean /= 200.0;
  CHECK(mean > 11.0);  // uniform on {1..24} has mean 12.5, sd of mean ~0.49
  CHECK(mean < 14.0);
}

TEST_CASE("qsgd leaves the iterate near critical") {
  Rng rng(12);
  auto prob = quadratic(rng, 4, 1.0);
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  const auto res = run_qsgd(prob, 0.5, backend, rng, ledger);
  CHECK(prob.gradient(res.x).norm() < 1.0);
}

TEST_CASE("qsgd needs a smooth objective") {
  Rng rng(13);
  FixtureParams p;
  auto prob = make_fixture("linear", 2, p, rng);
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  CHECK_THROWS_AS((void)run_qsgd(prob, 0.5, backend, rng, ledger),
                  capability_error);
}

TEST_CASE("qspider rejects oracles without a shared seed") {
  Rng rng(14);
  FixtureParams p;
  p.extra["noise"] = 0.25;
  auto prob = make_fixture("ball-distance", 2, p, rng);
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  CHECK_THROWS_AS((void)run_qspider(prob, 0.1, backend, rng, ledger),
                  capability_error);
}

TEST_CASE("qspider rejects targets beyond the noise floor") {
  Rng rng(15);
  FixtureParams p;
  auto prob = make_fixture("seeded-smooth-nonconvex", 2, p, rng);  // sigma = 1
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  CHECK_THROWS_AS((void)run_qspider(prob, 1.5, backend, rng, ledger),
                  contract_violation);
}

TEST_CASE("qspider stops immediately at an exact critical point") {
  Rng rng(16);
  auto prob = quadratic(rng, 3, 0.0);  // minimum at the origin, gap 0
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  const auto res = run_qspider(prob, 0.5, backend, rng, ledger);
  CHECK(res.early);
  CHECK(res.steps == 0);
  CHECK(res.x.norm() == 0.0);
  CHECK(res.max_step_error == 0.0);
  CHECK(ledger.quantum_queries_charged() > 0);  // the anchor estimate ran
}

TEST_CASE("qspider walks the valley with exact step lengths") {
  Rng rng(17);
  FixtureParams p;
  auto prob = make_fixture("seeded-smooth-nonconvex", 2, p, rng);
  const MeanEstimationBackend backend{};
  QueryLedger ledger;
  const double eps = 0.6;
  const auto res = run_qspider(prob, eps, backend, rng, ledger);
  CHECK(res.steps >= 1);
  CHECK(res.max_step_error <= 1e-12);
  CHECK(std::isfinite(res.x.norm()));
  if (res.early) {
    // the estimate that triggered the stop certifies near-criticality
    CHECK(prob.gradient(res.x).norm() < 4.0 * eps);
  }
}

TEST_CASE("sgd baseline pays list price per draw") {
  Rng rng(18);
  FixtureParams p;
  auto prob = make_fixture("ball-distance", 2, p, rng);
  QueryLedger ledger;
  const auto res = run_sgd_baseline(prob, 0.5, rng, ledger);  // (LR/eps)^2 = 4
  CHECK(res.steps == 4);
  CHECK(ledger.quantum_queries_charged() == 4);
  CHECK(ledger.classical_samples_drawn() == 4);
  CHECK(res.x.norm() <= prob.radius + 1e-12);
}
