#pragma once

#include <optional>

#include "qso/oracle.hpp"

namespace qso {

enum class BackendMode {
  // Models the quantum estimator's accuracy contract directly: needs the
  // source's exact mean, adds bounded noise, charges the modeled query cost.
  // Exists so scaling sweeps and adversarial stress stay cheap.
  contract,
  // Classical groups-of-means estimator meeting the same contract from real
  // draws. Cost grows like 1/sigma_hat^2 per group, so deep pipelines are out
  // of its reach by design.
  sample_based,
};

enum class NoisePolicy {
  honest_gaussian_clipped,  // Gaussian error, rescaled so ||eta|| <= sigma_hat
  adversarial_boundary,     // ||eta|| = sigma_hat exactly, uniform direction
};

struct BackendConfig {
  BackendMode mode = BackendMode::contract;
  NoisePolicy noise = NoisePolicy::honest_gaussian_clipped;
  // With probability delta, return mean + rho * (uniform unit vector) instead;
  // rho defaults to 10 * L_eff^3 / sigma_hat^2 at call time.
  bool inject_failures = false;
  std::optional<double> failure_radius;
  double c_qme = 1.0;
};

class MeanEstimationBackend {
 public:
  MeanEstimationBackend() = default;
  explicit MeanEstimationBackend(BackendConfig cfg) : cfg_(cfg) {}

  const BackendConfig& config() const { return cfg_; }

  // One estimate with ||result - mean|| <= sigma_hat with probability >= 1-delta.
  // Exactly one charge_cost per invocation (scaled by the source's query
  // multiplier); sample mode additionally draws n*k classical samples.
  Vec estimate_mean(const RandomVariableSource& src, double sigma_hat, double delta,
                    Rng& rng, QueryLedger& ledger) const;

  static std::uint64_t group_count(double delta);     // ceil(log2(1/delta)) + 10
  static std::uint64_t group_size(double l_eff, double sigma_hat);  // max(1, ceil(16 L^2/s^2))

 private:
  Vec contract_estimate(const RandomVariableSource& src, double sigma_hat,
                        double delta, Rng& rng) const;
  Vec sample_estimate(const RandomVariableSource& src, double sigma_hat,
                      double delta, Rng& rng, QueryLedger& ledger) const;

  BackendConfig cfg_;
};

struct RobustFilterParams {
  double x1_accuracy = 0.0;
  double delta = 0.0;
  double accept_radius = 0.0;  // D
};

// Parameters the variance-bounded wrapper uses for target accuracy sigma_hat:
// X1 accuracy sigma_hat/4, delta = (sigma_hat/(4L))^6, D = sigma_hat/4 + 16 L^3/sigma_hat^2.
RobustFilterParams qme_plus_params(double sigma_hat, double l_eff);

// X1 <- estimate_mean(src, p.x1_accuracy, p.delta); X2 <- one classical draw;
// keep X1 if ||X1 - X2|| <= p.accept_radius, else return a fresh draw.
// Classical draws are charged one modeled query each (times the source's
// multiplier), so rare estimator failures cannot poison the mean square error.
Vec robust_filtered_estimate(const MeanEstimationBackend& backend,
                             const RandomVariableSource& src,
                             const RobustFilterParams& p, Rng& rng,
                             QueryLedger& ledger);

// Mean square error <= sigma_hat^2 for any sigma_hat <= L_eff. If sigma_hat >
// L_eff a single classical draw already meets the bound and is returned.
Vec qme_plus(const MeanEstimationBackend& backend, const RandomVariableSource& src,
             double sigma_hat, Rng& rng, QueryLedger& ledger);

// Exactly unbiased estimate with E||out - mean||^2 <= sigma_hat^2: a base
// estimate at accuracy sigma_hat/10 plus a geometrically weighted telescoping
// correction. Level J >= 1 has probability 2^-J and is not truncated.
Vec mlmc_variance_reduce(const MeanEstimationBackend& backend,
                         const RandomVariableSource& src, double sigma_hat,
                         Rng& rng, QueryLedger& ledger);

struct GradientEstimate {
  Vec value;
  bool degraded = false;  // no estimate met the agreement rule; medoid returned
};

std::uint64_t approx_gradient_repetitions(double xi);  // ceil(log2(1/xi)) + 10

// ||result - mean|| <= delta_err with probability >= 1 - xi: k repetitions of
// mlmc_variance_reduce at target variance delta_err^2/16, returning one that
// lies within delta_err/2 of at least 2k/3 of the others.
GradientEstimate approx_gradient(const MeanEstimationBackend& backend,
                                 const RandomVariableSource& src, double delta_err,
                                 double xi, Rng& rng, QueryLedger& ledger);

}  // namespace qso
