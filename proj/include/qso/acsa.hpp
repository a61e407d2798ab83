#pragma once

#include "qso/fixtures.hpp"
#include "qso/mean_estimation.hpp"

namespace qso {

// Gaussian-smoothed view of a base oracle: a draw at x samples the base once
// at x - y with fresh y ~ N(0, r^2 I), so it is an unbiased stochastic
// gradient of the convolved objective at the cost of one base draw.
class ConvolvedOracle final : public StochasticGradientOracle {
 public:
  ConvolvedOracle(OraclePtr base, double r);

  double smoothing_radius() const { return r_; }

 protected:
  Vec draw(const Vec& x, Rng& rng) const override;
  Vec mean(const Vec& x) const override;

 private:
  static Traits make_traits(const OraclePtr& base, double r);

  OraclePtr base_;
  double r_;
};

struct AcsaParameters {
  int t_steps = 0;
  double sigma_hat = 0.0;
  double r = 0.0;
  double gamma = 0.0;
  double smoothed_lipschitz = 0.0;  // L / r
  // epsilon exceeded L*R, where any feasible point is epsilon-optimal; the
  // formulas below were evaluated at the clamped value.
  bool clamped = false;
};

AcsaParameters acsa_parameters(Eigen::Index d, double lipschitz, double radius,
                               double epsilon);

// Exact minimizer of gamma_t*<g, z - x_md> + (L/(2r))*||x_md - z||^2 over the
// radius-R ball: a gradient shift followed by radial projection.
Vec prox_step(const Vec& x_md, const Vec& g, double gamma_t, double lipschitz,
              double r, double radius);

struct AcsaResult {
  Vec x;
  int iterations = 0;
  bool clamped = false;
};

// Smoothing + accelerated stochastic approximation with variance-reduced
// gradient estimates; returns the averaged iterate.
AcsaResult run_acsa(const ProblemInstance& problem, double epsilon,
                    const MeanEstimationBackend& backend, Rng& rng,
                    QueryLedger& ledger);

}  // namespace qso
