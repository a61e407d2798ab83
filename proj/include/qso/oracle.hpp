#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "qso/common.hpp"
#include "qso/ledger.hpp"
#include "qso/rng.hpp"

namespace qso {

// Stochastic (sub)gradient oracle. Implementations are immutable and safe to
// share across threads; all randomness flows through the caller's Rng.
class StochasticGradientOracle {
 public:
  struct Traits {
    Eigen::Index dim = 0;
    // E||g(x,w)||^2 <= lipschitz_bound^2 when set (bounded oracles).
    std::optional<double> lipschitz_bound;
    // E||g(x,w) - mean||^2 <= variance_bound^2 when set.
    std::optional<double> variance_bound;
    // E||g(x,w) - g(y,w)||^2 <= mean_square_smoothness^2 * ||x-y||^2 when set.
    std::optional<double> mean_square_smoothness;
    bool has_exact_mean = false;
    bool has_shared_seed = false;
  };

  virtual ~StochasticGradientOracle() = default;

  const Traits& traits() const { return traits_; }
  Eigen::Index dim() const { return traits_.dim; }

  // One classical draw; counts one classical sample on the ledger.
  Vec sample(const Vec& x, Rng& rng, QueryLedger& ledger) const {
    check_dim(x);
    ledger.add_classical(1);
    return draw(x, rng);
  }

  // Draw without touching the ledger (wrappers and offline truth use this).
  Vec sample_raw(const Vec& x, Rng& rng) const {
    check_dim(x);
    return draw(x, rng);
  }

  // Common-random-numbers channel: g(x, omega) for an explicit seed. Same
  // (x, omega) always yields the same vector. Off-ledger; callers account.
  Vec sample_with_seed(const Vec& x, std::uint64_t omega) const {
    check_dim(x);
    if (!traits_.has_shared_seed)
      throw capability_error("oracle: shared-seed sampling not supported");
    return draw_with_seed(x, omega);
  }

  // Truth channel; never charged to the ledger.
  Vec exact_mean(const Vec& x) const {
    check_dim(x);
    if (!traits_.has_exact_mean)
      throw capability_error("oracle: exact mean not available");
    return mean(x);
  }

  // E_{y~N(0,r^2 I)}[mean(x - y)] in closed or quadrature form, when available.
  virtual std::optional<Vec> convolved_mean(const Vec& x, double r) const {
    (void)x;
    (void)r;
    return std::nullopt;
  }

  // Distribution-exact mean of n i.i.d. draws at x, when the aggregate law has
  // a closed form; simulation shortcut only, callers still account n draws.
  virtual std::optional<Vec> aggregate_draw(const Vec& x, std::uint64_t n, Rng& rng) const {
    (void)x;
    (void)n;
    (void)rng;
    return std::nullopt;
  }

 protected:
  explicit StochasticGradientOracle(Traits t) : traits_(t) {
    require(traits_.dim >= 1, "oracle: dim must be >= 1");
  }

  virtual Vec draw(const Vec& x, Rng& rng) const = 0;
  virtual Vec draw_with_seed(const Vec& x, std::uint64_t omega) const {
    (void)x;
    (void)omega;
    throw capability_error("oracle: shared-seed sampling not implemented");
  }
  virtual Vec mean(const Vec& x) const {
    (void)x;
    throw capability_error("oracle: exact mean not implemented");
  }

  void check_dim(const Vec& x) const {
    if (x.size() != traits_.dim)
      throw std::invalid_argument("oracle: query point has wrong dimension");
  }

  Traits traits_;
};

using OraclePtr = std::shared_ptr<const StochasticGradientOracle>;

// A random vector to feed the mean estimators: one draw per call, with a
// declared deviation bound (the contract's L). draw/draw_mean account their
// classical samples on the ledger they are handed.
struct RandomVariableSource {
  Eigen::Index dim = 0;
  double second_moment_bound = 0.0;  // L_eff: E||X - mean||^2 <= L_eff^2
  std::function<Vec(Rng&, QueryLedger&)> draw;
  // Optional closed-form "mean of n draws" shortcut (distribution-exact).
  std::function<Vec(std::uint64_t, Rng&, QueryLedger&)> draw_mean;
  std::optional<Vec> exact_mean;
  // Modeled oracle queries consumed per draw (difference oracles cost 2).
  int query_multiplier = 1;
};

// Mean of n i.i.d. draws, via the aggregate shortcut when present.
Vec source_mean_of(const RandomVariableSource& src, std::uint64_t n, Rng& rng,
                   QueryLedger& ledger);

// Wrap `oracle` at query point x. l_eff defaults to the oracle's Lipschitz
// bound, falling back to its variance bound.
RandomVariableSource gradient_source(const OraclePtr& oracle, const Vec& x,
                                     std::optional<double> l_eff = std::nullopt);

}  // namespace qso
