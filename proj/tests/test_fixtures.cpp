#include <cmath>
#include <set>

#include "doctest.h"
#include "qso/fixtures.hpp"

using namespace qso;

TEST_CASE("unknown fixture parameters are rejected") {
  Rng rng(1);
  FixtureParams p;
  p.extra["wobble"] = 3.0;
  CHECK_THROWS_AS((void)make_fixture("linear", 2, p, rng), config_error);
  CHECK_THROWS_AS((void)make_fixture("nope", 2, FixtureParams{}, rng), config_error);
}

TEST_CASE("linear fixture geometry") {
  Rng rng(2);
  FixtureParams p;
  p.lipschitz = 2.0;
  p.radius = 1.5;
  p.extra["noise"] = 0.5;
  auto prob = make_fixture("linear", 3, p, rng);
  CHECK(prob.lipschitz == doctest::Approx(std::sqrt(4.0 + 0.25)));
  CHECK(*prob.optimum_value == doctest::Approx(-2.0 * 1.5));
  CHECK(prob.objective(*prob.minimizer) == doctest::Approx(*prob.optimum_value));
  CHECK(prob.minimizer->norm() == doctest::Approx(1.5));
  const Vec truth = prob.oracle->exact_mean(Vec::Zero(3));
  const auto mc = offline_mean(*prob.oracle, Vec::Zero(3), 20000, rng);
  CHECK((mc.value - truth).norm() < 5.0 * mc.std_error);
}

TEST_CASE("ball-distance fixture geometry") {
  Rng rng(3);
  auto prob = make_fixture("ball-distance", 2, FixtureParams{}, rng);
  Vec a(2);
  a << 0.3, -0.2;
  CHECK((*prob.minimizer - a).norm() < 1e-12);
  CHECK(*prob.optimum_value == 0.0);
  Vec x(2);
  x << 0.9, 0.1;
  CHECK(prob.objective(x) == doctest::Approx((x - a).norm()));
  CHECK(prob.gradient(x).norm() == doctest::Approx(1.0));
  CHECK(prob.gradient(a).norm() == 0.0);

  FixtureParams wide;
  wide.extra["shift_x"] = 2.0;
  CHECK_THROWS_AS((void)make_fixture("ball-distance", 2, wide, rng),
                  std::invalid_argument);
}

TEST_CASE("ball-distance convolved mean matches brute force") {
  Rng rng(4);
  auto prob = make_fixture("ball-distance", 2, FixtureParams{}, rng);
  Vec x(2);
  x << 0.5, 0.3;
  const double r = 0.2;
  const auto closed = prob.oracle->convolved_mean(x, r);
  REQUIRE(closed.has_value());
  const auto mc = offline_convolved_gradient(*prob.oracle, x, r, 200000, rng);
  CHECK((*closed - mc.value).norm() < 5.0 * mc.std_error + 1e-6);
}

TEST_CASE("quadratic fixture with interior and exterior minimizer") {
  Rng rng(5);
  FixtureParams inner;
  inner.extra["shift"] = 0.5;
  inner.extra["noise"] = 0.0;
  auto prob = make_fixture("quadratic", 2, inner, rng);
  CHECK(*prob.optimum_value == 0.0);
  CHECK((*prob.minimizer)[0] == doctest::Approx(0.5));
  CHECK(*prob.gap_bound == doctest::Approx(0.125));
  CHECK(*prob.smoothness == 1.0);

  FixtureParams outer;
  outer.extra["shift"] = 1.5;
  auto far = make_fixture("quadratic-noisy", 2, outer, rng);
  CHECK(far.minimizer->norm() == doctest::Approx(1.0));
  CHECK(*far.optimum_value == doctest::Approx(0.125));
}

TEST_CASE("quadratic shared-seed noise is seed-determined and cancels") {
  Rng rng(6);
  FixtureParams p;
  p.extra["shift"] = 1.0;
  auto prob = make_fixture("quadratic-noisy", 3, p, rng);
  const auto& oracle = *prob.oracle;
  Vec x = Vec::Zero(3);
  Vec y(3);
  y << 0.2, -0.1, 0.4;
  CHECK((oracle.sample_with_seed(x, 99) - oracle.sample_with_seed(x, 99)).norm() ==
        0.0);
  // same seed at two points: the additive noise drops out of the difference
  const Vec d = oracle.sample_with_seed(x, 99) - oracle.sample_with_seed(y, 99);
  CHECK((d - Vec(x - y)).norm() < 1e-12);
  // distinct seeds decorrelate
  CHECK((oracle.sample_with_seed(x, 99) - oracle.sample_with_seed(x, 100)).norm() >
        1e-3);
}

TEST_CASE("quadratic draw variance matches its declaration") {
  Rng rng(7);
  FixtureParams p;
  auto prob = make_fixture("quadratic-noisy", 2, p, rng);
  const Vec x = Vec::Zero(2);
  const Vec mean = prob.oracle->exact_mean(x);
  double acc = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    acc += (prob.oracle->sample_raw(x, rng) - mean).squaredNorm();
  const double sigma = *prob.variance;
  CHECK(acc / n == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("seeded nonconvex fixture: gradient, noise law, smoothness") {
  Rng rng(8);
  auto prob = make_fixture("seeded-smooth-nonconvex", 2, FixtureParams{}, rng);
  const auto& oracle = *prob.oracle;

  // finite-difference check of the deterministic part
  for (double x1 : {-0.7, 0.4, 2.0}) {
    Vec x(2);
    x << x1, 0.6;
    const double h = 1e-6;
    Vec g = prob.gradient(x);
    for (int i = 0; i < 2; ++i) {
      Vec hi = x, lo = x;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (prob.objective(hi) - prob.objective(lo)) / (2.0 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-4));
    }
  }

  // noise second moment is exactly sigma^2 in law
  Vec x(2);
  x << 0.3, -0.5;
  const Vec mean = oracle.exact_mean(x);
  CHECK((mean - prob.gradient(x)).norm() < 1e-12);
  double acc = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i)
    acc += (oracle.sample_with_seed(x, rng.next_u64()) - mean).squaredNorm();
  const double sigma = *prob.variance;
  CHECK(acc / n == doctest::Approx(sigma * sigma).epsilon(0.05));

  // empirical mean-square smoothness stays below the declared constant
  const double ell = *prob.smoothness;
  Vec y = x;
  y[0] += 0.05;
  y[1] -= 0.02;
  double ms = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t omega = rng.next_u64();
    ms += (oracle.sample_with_seed(x, omega) - oracle.sample_with_seed(y, omega))
              .squaredNorm();
  }
  CHECK(ms / n <= ell * ell * (x - y).squaredNorm());
}

TEST_CASE("hard instance structure") {
  Rng rng(9);
  const auto inst = make_hard_instance(6, 8, 1.0, 2.0, rng);
  CHECK(inst.rows() == 6);
  CHECK(inst.cols() == 8);
  CHECK(inst.scale == doctest::Approx(8.0 / std::sqrt(4.0 * 64.0 - 1.0)));

  // row weights split between floor(m/2) and floor(m/2)+1, flagged by b
  int heavy = 0;
  for (Eigen::Index i = 0; i < inst.rows(); ++i) {
    const double w = inst.a.row(i).sum();
    if (inst.b[i] == 1.0) {
      CHECK(w == 5.0);
      ++heavy;
    } else {
      CHECK(w == 4.0);
    }
  }
  CHECK(heavy == 3);

  // per-entry gradients are signed scaled basis vectors
  for (Eigen::Index i = 0; i < inst.rows(); ++i)
    for (Eigen::Index j = 0; j < inst.cols(); ++j) {
      const Vec g = inst.g(i, j);
      CHECK(g.norm() == doctest::Approx(inst.scale));
      CHECK(std::abs(g[i]) == doctest::Approx(inst.scale));
    }

  // gbar recomputed from scratch
  Vec gbar = Vec::Zero(6);
  for (Eigen::Index i = 0; i < inst.rows(); ++i)
    for (Eigen::Index j = 0; j < inst.cols(); ++j) gbar += inst.g(i, j);
  gbar /= static_cast<double>(inst.rows() * inst.cols());
  CHECK((gbar - inst.gbar).norm() < 1e-12);
}

TEST_CASE("hard instance subgradients are bounded and convexity holds") {
  Rng rng(10);
  const double lip = 1.3;
  const double radius = 2.0;
  const auto inst = make_hard_instance(5, 6, lip, radius, rng);
  for (int t = 0; t < 1000; ++t) {
    const Vec x = radius * 1.5 * rng.gaussian_vec(5);
    const auto i = static_cast<Eigen::Index>(rng.next_below(5));
    const auto j = static_cast<Eigen::Index>(rng.next_below(6));
    CHECK(inst.subgradient(i, j, x).norm() <= lip + 1e-9);
    CHECK(inst.mean_subgradient(x).norm() <= lip + 1e-9);
  }
  for (int t = 0; t < 300; ++t) {
    const Vec x = rng.gaussian_vec(5);
    const Vec y = rng.gaussian_vec(5);
    const double lam = rng.next_double();
    const double mix = inst.objective(lam * x + (1.0 - lam) * y);
    CHECK(mix <= lam * inst.objective(x) + (1.0 - lam) * inst.objective(y) + 1e-9);
  }
  const auto xs = inst.minimizer();
  REQUIRE(xs.has_value());
  CHECK(xs->norm() == doctest::Approx(radius / 2.0));
  for (int t = 0; t < 200; ++t) {
    const Vec x = radius * rng.gaussian_vec(5) / std::sqrt(5.0);
    CHECK(inst.objective(*xs) <= inst.objective(x) + 1e-9);
  }
}

TEST_CASE("hard instance oracle draws average to the mean subgradient") {
  Rng rng(11);
  FixtureParams p;
  p.radius = 2.0;
  auto prob = make_fixture("hard-instance", 4, p, rng);
  Vec x(4);
  x << 0.8, -0.5, 1.2, 0.1;
  const Vec truth = prob.gradient(x);
  const auto mc = offline_mean(*prob.oracle, x, 40000, rng);
  CHECK((mc.value - truth).norm() < 5.0 * mc.std_error);

  // the aggregate shortcut agrees with looped draws in distribution
  QueryLedger ledger;
  Rng rng2(12);
  const auto agg = prob.oracle->aggregate_draw(x, 50000, rng2);
  REQUIRE(agg.has_value());
  CHECK((*agg - truth).norm() < 5.0 * mc.std_error);
}

TEST_CASE("quadrature rule integrates against its weight") {
  std::vector<double> nodes, weights;
  gauss_hermite(7, nodes, weights);
  REQUIRE(nodes.size() == 7);
  double s0 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < 7; ++i) {
    s0 += weights[i];
    s2 += weights[i] * nodes[i] * nodes[i];
    s4 += weights[i] * std::pow(nodes[i], 4.0);
  }
  const double rp = std::sqrt(M_PI);
  CHECK(s0 == doctest::Approx(rp).epsilon(1e-12));
  CHECK(s2 == doctest::Approx(rp / 2.0).epsilon(1e-12));
  CHECK(s4 == doctest::Approx(3.0 * rp / 4.0).epsilon(1e-12));
}

TEST_CASE("tensor quadrature reproduces exact convolutions") {
  // convolution of a linear map is the map itself
  Vec c(2);
  c << 0.7, -0.4;
  const auto lin = [c](const Vec&) { return c; };
  Vec x(2);
  x << 0.1, 0.2;
  CHECK((gauss_hermite_convolved_mean(lin, x, 0.3) - c).norm() < 1e-12);

  const auto affine = [](const Vec& z) { return Vec(2.0 * z); };
  const Vec conv = gauss_hermite_convolved_mean(affine, x, 0.3);
  CHECK((conv - 2.0 * x).norm() < 1e-10);
}

TEST_CASE("smoothing moves the objective by at most L r sqrt(d)") {
  Rng rng(13);
  auto prob = make_fixture("ball-distance", 2, FixtureParams{}, rng);
  const double r = 0.15;
  Vec x(2);
  x << -0.4, 0.6;
  const auto fr = offline_convolved_value(prob.objective, x, r, 100000, rng);
  const double drift = std::abs(fr.value - prob.objective(x));
  CHECK(drift <= 1.0 * r * std::sqrt(2.0) + 5.0 * fr.std_error);
}
