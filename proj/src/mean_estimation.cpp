#include "qso/mean_estimation.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qso {
namespace {

double pairwise_need(std::uint64_t k) {
  // "within range of at least 2k/3 of the others", ties included
  return 2.0 * static_cast<double>(k) / 3.0;
}

// Index of the sample minimizing the summed distance to all others.
std::size_t medoid_index(const std::vector<Vec>& pts) {
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) s += (pts[i] - pts[j]).norm();
    }
    if (s < best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return best;
}

std::optional<std::size_t> select_agreeing(const std::vector<Vec>& pts,
                                           double radius) {
  const double need = pairwise_need(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::uint64_t close = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i && (pts[i] - pts[j]).norm() <= radius) ++close;
    }
    if (static_cast<double>(close) >= need) return i;
  }
  return std::nullopt;
}

}  // namespace

std::uint64_t MeanEstimationBackend::group_count(double delta) {
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0,1]");
  return static_cast<std::uint64_t>(std::ceil(std::log2(1.0 / delta))) + 10;
}

std::uint64_t MeanEstimationBackend::group_size(double l_eff, double sigma_hat) {
  require(sigma_hat > 0.0, "sigma_hat must be positive");
  require(l_eff >= 0.0, "second moment bound must be nonnegative");
  if (l_eff == 0.0) return 1;
  double n = std::ceil(16.0 * l_eff * l_eff / (sigma_hat * sigma_hat));
  require(n < 9.0e18, "sample backend group size overflows");
  return static_cast<std::uint64_t>(n);
}

Vec MeanEstimationBackend::estimate_mean(const RandomVariableSource& src,
                                         double sigma_hat, double delta, Rng& rng,
                                         QueryLedger& ledger) const {
  require(src.dim >= 1, "source dimension must be positive");
  require(sigma_hat > 0.0, "sigma_hat must be positive");
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0,1]");
  if (src.second_moment_bound > 0.0 && sigma_hat > src.second_moment_bound) {
    throw contract_violation(
        "estimate_mean requires sigma_hat <= the source's second moment bound");
  }
  const std::uint64_t q = charge_cost(ledger, src.second_moment_bound, sigma_hat,
                                      delta, static_cast<int>(src.dim), cfg_.c_qme);
  if (src.query_multiplier > 1) {
    ledger.add_quantum(q * static_cast<std::uint64_t>(src.query_multiplier - 1));
  }
  if (cfg_.mode == BackendMode::contract) {
    return contract_estimate(src, sigma_hat, delta, rng);
  }
  return sample_estimate(src, sigma_hat, delta, rng, ledger);
}

Vec MeanEstimationBackend::contract_estimate(const RandomVariableSource& src,
                                             double sigma_hat, double delta,
                                             Rng& rng) const {
  if (!src.exact_mean) {
    throw capability_error("contract backend needs a source with a known mean");
  }
  const Vec& mean = *src.exact_mean;
  const double l_eff = src.second_moment_bound;
  if (l_eff == 0.0) return mean;  // deterministic source, estimate is exact
  if (cfg_.inject_failures && rng.next_double() < delta) {
    const double rho = cfg_.failure_radius
                           ? *cfg_.failure_radius
                           : 10.0 * l_eff * l_eff * l_eff / (sigma_hat * sigma_hat);
    return mean + rho * rng.unit_vec(src.dim);
  }
  if (cfg_.noise == NoisePolicy::adversarial_boundary) {
    return mean + sigma_hat * rng.unit_vec(src.dim);
  }
  Vec eta = (sigma_hat / (2.0 * std::sqrt(static_cast<double>(src.dim)))) *
            rng.gaussian_vec(src.dim);
  const double norm = eta.norm();
  if (norm > sigma_hat) eta *= sigma_hat / norm;
  return mean + eta;
}

Vec MeanEstimationBackend::sample_estimate(const RandomVariableSource& src,
                                           double sigma_hat, double delta, Rng& rng,
                                           QueryLedger& ledger) const {
  const std::uint64_t k = group_count(delta);
  const std::uint64_t n = group_size(src.second_moment_bound, sigma_hat);
  std::vector<Vec> means;
  means.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    means.push_back(source_mean_of(src, n, rng, ledger));
  }
  if (auto idx = select_agreeing(means, sigma_hat / 2.0)) return means[*idx];
  return means[medoid_index(means)];
}

RobustFilterParams qme_plus_params(double sigma_hat, double l_eff) {
  require(sigma_hat > 0.0, "sigma_hat must be positive");
  require(l_eff > 0.0 && sigma_hat <= l_eff,
          "robust filter needs 0 < sigma_hat <= second moment bound");
  RobustFilterParams p;
  p.x1_accuracy = sigma_hat / 4.0;
  p.delta = std::pow(sigma_hat / (4.0 * l_eff), 6.0);
  p.accept_radius =
      sigma_hat / 4.0 + 16.0 * l_eff * l_eff * l_eff / (sigma_hat * sigma_hat);
  return p;
}

Vec robust_filtered_estimate(const MeanEstimationBackend& backend,
                             const RandomVariableSource& src,
                             const RobustFilterParams& p, Rng& rng,
                             QueryLedger& ledger) {
  const std::uint64_t mult = static_cast<std::uint64_t>(src.query_multiplier);
  const Vec x1 = backend.estimate_mean(src, p.x1_accuracy, p.delta, rng, ledger);
  const Vec x2 = src.draw(rng, ledger);
  ledger.add_quantum(mult);
  if ((x1 - x2).norm() <= p.accept_radius) return x1;
  // Estimator output disagrees with a raw draw beyond what either's tail
  // allows; discard it and pay for one more draw instead.
  const Vec x3 = src.draw(rng, ledger);
  ledger.add_quantum(mult);
  return x3;
}

Vec qme_plus(const MeanEstimationBackend& backend, const RandomVariableSource& src,
             double sigma_hat, Rng& rng, QueryLedger& ledger) {
  require(sigma_hat > 0.0, "sigma_hat must be positive");
  const double l_eff = src.second_moment_bound;
  if (sigma_hat > l_eff) {
    // A single draw already has mean square error <= l_eff^2 <= sigma_hat^2.
    const Vec x = src.draw(rng, ledger);
    ledger.add_quantum(static_cast<std::uint64_t>(src.query_multiplier));
    return x;
  }
  return robust_filtered_estimate(backend, src, qme_plus_params(sigma_hat, l_eff),
                                  rng, ledger);
}

Vec mlmc_variance_reduce(const MeanEstimationBackend& backend,
                         const RandomVariableSource& src, double sigma_hat,
                         Rng& rng, QueryLedger& ledger) {
  require(sigma_hat > 0.0, "sigma_hat must be positive");
  const double base = sigma_hat / 10.0;
  const Vec m0 = qme_plus(backend, src, base, rng, ledger);
  // J is geometric with success probability 1/2, support {1, 2, ...}. The
  // telescoping correction keeps the estimate exactly unbiased for any
  // per-level bias profile, so no truncation is applied.
  int level = 1;
  while (rng.next_coin()) ++level;
  const double acc_j = base * std::pow(2.0, -0.75 * level);
  const double acc_jm1 = base * std::pow(2.0, -0.75 * (level - 1));
  const Vec mj = qme_plus(backend, src, acc_j, rng, ledger);
  const Vec mjm1 = qme_plus(backend, src, acc_jm1, rng, ledger);
  return m0 + std::ldexp(1.0, level) * (mj - mjm1);
}

std::uint64_t approx_gradient_repetitions(double xi) {
  require(xi > 0.0 && xi <= 1.0, "xi must lie in (0,1]");
  return static_cast<std::uint64_t>(std::ceil(std::log2(1.0 / xi))) + 10;
}

GradientEstimate approx_gradient(const MeanEstimationBackend& backend,
                                 const RandomVariableSource& src, double delta_err,
                                 double xi, Rng& rng, QueryLedger& ledger) {
  require(delta_err > 0.0, "delta_err must be positive");
  const std::uint64_t k = approx_gradient_repetitions(xi);
  std::vector<Vec> ests;
  ests.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    ests.push_back(
        mlmc_variance_reduce(backend, src, delta_err / 4.0, rng, ledger));
  }
  GradientEstimate out;
  if (auto idx = select_agreeing(ests, delta_err / 2.0)) {
    out.value = ests[*idx];
    return out;
  }
  out.value = ests[medoid_index(ests)];
  out.degraded = true;
  return out;
}

}  // namespace qso
