#include "qso/nonconvex.hpp"

#include <algorithm>
#include <cmath>

namespace qso {
namespace {

double required(const std::optional<double>& v, const char* what) {
  if (!v) throw capability_error(std::string("problem is missing ") + what);
  return *v;
}

// Shared-seed difference of the oracle at two points: one draw evaluates both
// points at the same seed (two oracle queries, hence the cost multiplier).
RandomVariableSource difference_source(const OraclePtr& oracle, const Vec& x_new,
                                       const Vec& x_old, double l_eff) {
  RandomVariableSource src;
  src.dim = oracle->dim();
  src.second_moment_bound = l_eff;
  src.query_multiplier = 2;
  Vec a = x_new, b = x_old;
  src.draw = [oracle, a, b](Rng& rng, QueryLedger& ledger) {
    const std::uint64_t omega = rng.next_u64();
    ledger.add_classical(2);
    return Vec(oracle->sample_with_seed(a, omega) -
               oracle->sample_with_seed(b, omega));
  };
  if (oracle->traits().has_exact_mean) {
    src.exact_mean = Vec(oracle->exact_mean(a) - oracle->exact_mean(b));
  }
  return src;
}

}  // namespace

QsgdResult run_qsgd(const ProblemInstance& problem, double epsilon,
                    const MeanEstimationBackend& backend, Rng& rng,
                    QueryLedger& ledger) {
  require(problem.oracle != nullptr, "problem has no oracle");
  require(epsilon > 0.0, "epsilon must be positive");
  const double sigma =
      problem.variance ? *problem.variance
                       : required(problem.oracle->traits().variance_bound,
                                  "a variance bound");
  const double ell = required(problem.smoothness, "a smoothness constant");
  const double gap = required(problem.gap_bound, "an objective gap bound");
  const double sigma_hat = epsilon / 3.0;
  const double t_real = std::ceil(12.0 * gap * ell / (epsilon * epsilon));
  require(t_real < 9.0e18, "iteration budget overflows");
  const auto t_budget = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(t_real));
  const std::uint64_t n_stop = 1 + rng.next_below(t_budget);
  Vec x = Vec::Zero(problem.oracle->dim());
  for (std::uint64_t t = 0; t < n_stop; ++t) {
    const auto src = gradient_source(problem.oracle, x, sigma);
    const Vec g = mlmc_variance_reduce(backend, src, sigma_hat, rng, ledger);
    x -= g / ell;
  }
  return {std::move(x), n_stop};
}

QspiderResult run_qspider(const ProblemInstance& problem, double epsilon,
                          const MeanEstimationBackend& backend, Rng& rng,
                          QueryLedger& ledger) {
  require(problem.oracle != nullptr, "problem has no oracle");
  require(epsilon > 0.0, "epsilon must be positive");
  const auto& oracle = problem.oracle;
  if (!oracle->traits().has_shared_seed) {
    throw capability_error("spider needs a shared-seed oracle");
  }
  const double sigma =
      problem.variance ? *problem.variance
                       : required(oracle->traits().variance_bound,
                                  "a variance bound");
  if (epsilon > sigma) {
    throw contract_violation("spider requires epsilon <= the variance bound");
  }
  const double ell = problem.smoothness
                         ? *problem.smoothness
                         : required(oracle->traits().mean_square_smoothness,
                                    "a mean-square smoothness constant");
  const double gap = required(problem.gap_bound, "an objective gap bound");
  const auto q = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil(20.0 * sigma / epsilon)));
  const double sigma1 = epsilon / 40.0;
  const double sigma2 = sigma1 * std::sqrt(epsilon / (10.0 * sigma));
  const double t_real = std::ceil(1600.0 * ell * gap / (epsilon * epsilon));
  require(t_real < 9.0e18, "iteration budget overflows");
  const auto t_budget = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(t_real));
  Vec x = Vec::Zero(oracle->dim());
  Vec x_prev = x;
  Vec v = Vec::Zero(oracle->dim());
  double max_step_error = 0.0;
  for (std::uint64_t t = 0; t <= t_budget; ++t) {
    if (t % q == 0) {
      const auto src = gradient_source(oracle, x, sigma);
      v = mlmc_variance_reduce(backend, src, sigma1, rng, ledger);
    } else {
      const double l_eff = ell * (x - x_prev).norm();
      const auto src = difference_source(oracle, x, x_prev, l_eff);
      v += mlmc_variance_reduce(backend, src, sigma2, rng, ledger);
    }
    const double nv = v.norm();
    if (nv <= 2.0 * epsilon) return {std::move(x), t, true, max_step_error};
    x_prev = x;
    x -= (epsilon / ell) * (v / nv);  // step length exactly epsilon/ell
    max_step_error = std::max(
        max_step_error, std::abs((x - x_prev).norm() - epsilon / ell));
  }
  return {std::move(x), t_budget + 1, false, max_step_error};
}

SgdResult run_sgd_baseline(const ProblemInstance& problem, double epsilon,
                           Rng& rng, QueryLedger& ledger) {
  require(problem.oracle != nullptr, "problem has no oracle");
  require(epsilon > 0.0, "epsilon must be positive");
  const double l = problem.lipschitz;
  const double radius = problem.radius;
  const double t_real = std::ceil((l * radius / epsilon) * (l * radius / epsilon));
  require(t_real < 9.0e18, "iteration budget overflows");
  const auto t_budget = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(t_real));
  const double step = radius / (l * std::sqrt(static_cast<double>(t_budget)));
  Vec x = Vec::Zero(problem.oracle->dim());
  Vec sum = Vec::Zero(problem.oracle->dim());
  for (std::uint64_t t = 0; t < t_budget; ++t) {
    const Vec g = problem.oracle->sample(x, rng, ledger);
    ledger.add_quantum(1);  // the classical method pays list price per draw
    x -= step * g;
    const double n = x.norm();
    if (n > radius) x *= radius / n;
    sum += x;
  }
  return {Vec(sum / static_cast<double>(t_budget)), t_budget};
}

}  // namespace qso
