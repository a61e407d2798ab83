#include "qso/verify.hpp"

#include <array>
#include <cmath>
#include <random>

#include "qso/acsa.hpp"
#include "qso/line_search.hpp"
#include "qso/mean_estimation.hpp"
#include "qso/nonconvex.hpp"
#include "qso/record.hpp"

namespace qso {
namespace {

CheckResult upper(std::string name, double measured, double bound) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.bound = bound;
  c.at_least = false;
  c.pass = measured <= bound;
  return c;
}

CheckResult lower(std::string name, double measured, double bound) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.bound = bound;
  c.at_least = true;
  c.pass = measured >= bound;
  return c;
}

// Uniform over {+e1, -e1, +e2, -e2}: mean zero, E||X||^2 = 1, with a
// distribution-exact multinomial shortcut for the mean of n draws.
RandomVariableSource coordinate_atom_source() {
  RandomVariableSource src;
  src.dim = 2;
  src.second_moment_bound = 1.0;
  src.exact_mean = Vec::Zero(2);
  src.draw = [](Rng& rng, QueryLedger& ledger) {
    ledger.add_classical(1);
    const std::uint64_t k = rng.next_below(4);
    Vec v = Vec::Zero(2);
    v[static_cast<Eigen::Index>(k % 2)] = k < 2 ? 1.0 : -1.0;
    return v;
  };
  src.draw_mean = [](std::uint64_t n, Rng& rng, QueryLedger& ledger) {
    ledger.add_classical(n);
    auto eng = rng.engine();
    std::array<std::int64_t, 4> count{};
    std::int64_t rest = static_cast<std::int64_t>(n);
    double p_rest = 1.0;
    for (int a = 0; a < 3; ++a) {
      std::binomial_distribution<std::int64_t> bin(rest, 0.25 / p_rest);
      count[static_cast<std::size_t>(a)] = bin(eng);
      rest -= count[static_cast<std::size_t>(a)];
      p_rest -= 0.25;
    }
    count[3] = rest;
    Vec sum(2);
    sum << static_cast<double>(count[0] - count[2]),
        static_cast<double>(count[1] - count[3]);
    return Vec(sum / static_cast<double>(n));
  };
  return src;
}

void mlmc_suite(VerifyReport& rep, std::uint64_t seed) {
  const double sigma_hat = 0.3;
  const int runs = 100000;
  const double var_bound = 1.2 * sigma_hat * sigma_hat;
  const auto src = coordinate_atom_source();

  const auto measure = [&](const BackendConfig& bc, std::uint64_t stream,
                           double* out_mean_norm) {
    const MeanEstimationBackend backend(bc);
    Rng rng(seed, stream);
    QueryLedger ledger;
    Vec sum = Vec::Zero(2);
    double sumsq = 0.0;
    for (int i = 0; i < runs; ++i) {
      const Vec est = mlmc_variance_reduce(backend, src, sigma_hat, rng, ledger);
      sum += est;
      sumsq += est.squaredNorm();
    }
    if (out_mean_norm) *out_mean_norm = (sum / runs).norm();
    return sumsq / runs;  // mean is zero, so this is the mean square error
  };

  BackendConfig sample;
  sample.mode = BackendMode::sample_based;
  double mean_norm = 0.0;
  const double var_sample = measure(sample, 11, &mean_norm);
  rep.checks.push_back(upper("unbiased-sample-mean", mean_norm,
                             5.0 * sigma_hat / std::sqrt(double(runs))));
  rep.checks.push_back(upper("variance-sample", var_sample, var_bound));

  BackendConfig honest;
  rep.checks.push_back(
      upper("variance-contract-honest", measure(honest, 12, nullptr), var_bound));

  BackendConfig adversarial;
  adversarial.noise = NoisePolicy::adversarial_boundary;
  rep.checks.push_back(upper("variance-contract-adversarial",
                             measure(adversarial, 13, nullptr), var_bound));

  BackendConfig failing;
  failing.inject_failures = true;
  rep.checks.push_back(upper("variance-contract-failures",
                             measure(failing, 14, nullptr), var_bound));
}

void lemma22_suite(VerifyReport& rep, std::uint64_t seed) {
  const double l = 1.0;
  const double sh = 0.5;
  RobustFilterParams p;
  p.x1_accuracy = sh;
  p.delta = std::pow(sh / l, 6.0);
  p.accept_radius = sh + l * l * l / (sh * sh);

  BackendConfig bc;
  bc.inject_failures = true;  // default radius 10 L^3 / sigma_hat^2 = 40
  const MeanEstimationBackend backend(bc);
  const auto src = coordinate_atom_source();

  Rng rng(seed, 21);
  QueryLedger ledger;
  const int runs = 100000;
  double mse = 0.0;
  for (int i = 0; i < runs; ++i) {
    const Vec z = robust_filtered_estimate(backend, src, p, rng, ledger);
    mse += z.squaredNorm();
  }
  mse /= runs;
  rep.checks.push_back(upper("filtered-mse", mse, 13.0 * sh * sh));

  // Same failures without the filter step, for contrast: the accept test is
  // what keeps the injected outliers out of the mean square error.
  Rng raw_rng(seed, 22);
  double raw_mse = 0.0;
  for (int i = 0; i < runs; ++i) {
    const Vec z = backend.estimate_mean(src, sh, p.delta, raw_rng, ledger);
    raw_mse += z.squaredNorm();
  }
  raw_mse /= runs;
  rep.checks.push_back(lower("unfiltered-mse-exceeds", raw_mse, 13.0 * sh * sh));
}

void acsa_bound_suite(VerifyReport& rep, std::uint64_t seed) {
  FixtureParams fp;
  fp.extra["shift"] = 0.5;
  fp.extra["noise"] = 0.5;
  Rng fix_rng(seed, 31);
  const ProblemInstance problem = make_fixture("quadratic-noisy", 2, fp, fix_rng);
  const double radius = problem.radius;
  const double eps = 0.1;
  const auto par = acsa_parameters(2, problem.lipschitz, radius, eps);
  const double t_steps = static_cast<double>(par.t_steps);
  // Smoothed objective of the quadratic: F_r(x) = ||x-a||^2/2 + d r^2/2, so
  // the smoothed gap is just ||x-a||^2/2 and its optimum sits at a.
  Vec a = Vec::Zero(2);
  a[0] = 0.5;

  const MeanEstimationBackend backend{};
  const int trials = 100;
  double gap_sum = 0.0;
  double worst_radius = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, 3100 + static_cast<std::uint64_t>(t));
    QueryLedger ledger;
    const auto res = run_acsa(problem, eps, backend, rng, ledger);
    gap_sum += 0.5 * (res.x - a).squaredNorm();
    worst_radius = std::max(worst_radius, res.x.norm());
  }
  const double bound =
      4.0 * problem.lipschitz * radius * radius /
          (par.r * t_steps * (t_steps + 2.0)) +
      4.0 * radius * par.sigma_hat / std::sqrt(t_steps);
  rep.checks.push_back(upper("smoothed-gap-mean", gap_sum / trials, bound));
  rep.checks.push_back(upper("iterate-radius", worst_radius, radius + 1e-9));
}

void qscp_success_suite(VerifyReport& rep, std::uint64_t seed) {
  FixtureParams fp;
  fp.extra["noise"] = 0.25;
  Rng fix_rng(seed, 41);
  const ProblemInstance problem = make_fixture("ball-distance", 2, fp, fix_rng);
  const double eps = 0.1;
  const MeanEstimationBackend backend{};
  const int trials = 200;
  int successes = 0;
  int degraded = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, 4100 + static_cast<std::uint64_t>(t));
    QueryLedger ledger;
    const auto res = run_qscp(problem, eps, backend, rng, ledger);
    const double gap = problem.objective(res.x) - *problem.optimum_value;
    if (gap <= 2.0 * eps) ++successes;
    if (res.degraded) ++degraded;
  }
  const double p_hat = static_cast<double>(successes) / trials;
  const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / trials);
  rep.checks.push_back(lower("success-rate", p_hat, 2.0 / 3.0 - 3.0 * se));
  rep.checks.push_back(upper("degraded-runs", degraded, 0.0));
}

void spider_variance_suite(VerifyReport& rep, std::uint64_t seed) {
  {
    // Shared-seed noise on the quadratic is x-independent, so differences at a
    // common seed must cancel it exactly.
    FixtureParams fp;
    fp.extra["shift"] = 1.0;
    Rng rng(seed, 51);
    const ProblemInstance problem = make_fixture("quadratic-noisy", 3, fp, rng);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Vec x = 0.5 * rng.gaussian_vec(3);
      const Vec y = x + 0.01 * rng.unit_vec(3);
      const std::uint64_t omega = rng.next_u64();
      const Vec d = problem.oracle->sample_with_seed(x, omega) -
                    problem.oracle->sample_with_seed(y, omega);
      worst = std::max(worst, (d - Vec(x - y)).norm());
    }
    rep.checks.push_back(upper("shared-seed-cancellation", worst, 1e-12));
  }
  {
    // Empirical mean-square smoothness of the seeded nonconvex fixture against
    // its declared constant, across displacement scales.
    Rng rng(seed, 52);
    const ProblemInstance problem =
        make_fixture("seeded-smooth-nonconvex", 2, FixtureParams{}, rng);
    const double ell = *problem.smoothness;
    double worst_ratio = 0.0;
    const std::array<double, 3> scales = {1e-2, 1e-1, 1.0};
    for (int pair = 0; pair < 6; ++pair) {
      const Vec x = rng.gaussian_vec(2);
      const double step = scales[static_cast<std::size_t>(pair) % scales.size()];
      const Vec y = x + step * rng.unit_vec(2);
      const double dist2 = (x - y).squaredNorm();
      double acc = 0.0;
      for (int k = 0; k < 1000; ++k) {
        const std::uint64_t omega = rng.next_u64();
        acc += (problem.oracle->sample_with_seed(x, omega) -
                problem.oracle->sample_with_seed(y, omega))
                   .squaredNorm();
      }
      worst_ratio = std::max(worst_ratio, acc / 1000.0 / (ell * ell * dist2));
    }
    rep.checks.push_back(upper("valley-mss-ratio", worst_ratio, 1.0));
  }
  {
    // The walk takes constant-length normalized steps; verify to rounding.
    Rng rng(seed, 53);
    const ProblemInstance problem =
        make_fixture("seeded-smooth-nonconvex", 2, FixtureParams{}, rng);
    const MeanEstimationBackend backend{};
    QueryLedger ledger;
    const auto res = run_qspider(problem, 0.5, backend, rng, ledger);
    rep.checks.push_back(upper("step-length-error", res.max_step_error, 1e-12));
  }
}

}  // namespace

bool VerifyReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {
      "mlmc", "lemma22", "acsa-bound", "qscp-success", "spider-variance"};
  return names;
}

VerifyReport run_verify_suite(const std::string& suite, std::uint64_t seed) {
  VerifyReport rep;
  rep.suite = suite;
  if (suite == "mlmc") {
    mlmc_suite(rep, seed);
  } else if (suite == "lemma22") {
    lemma22_suite(rep, seed);
  } else if (suite == "acsa-bound") {
    acsa_bound_suite(rep, seed);
  } else if (suite == "qscp-success") {
    qscp_success_suite(rep, seed);
  } else if (suite == "spider-variance") {
    spider_variance_suite(rep, seed);
  } else {
    throw config_error("verify: unknown suite '" + suite + "'");
  }
  return rep;
}

std::string format_report(const VerifyReport& report) {
  std::string out;
  for (const auto& c : report.checks) {
    out += report.suite;
    out += '/';
    out += c.name;
    out += ": measured=";
    out += format_double(c.measured);
    out += c.at_least ? " >= " : " <= ";
    out += format_double(c.bound);
    out += " margin=";
    out += format_double(c.margin());
    out += c.pass ? " ok" : " FAIL";
    out += '\n';
  }
  out += report.suite;
  out += report.pass() ? ": PASS" : ": FAIL";
  out += '\n';
  return out;
}

}  // namespace qso
