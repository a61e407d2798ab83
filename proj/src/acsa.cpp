#include "qso/acsa.hpp"

#include <cmath>

namespace qso {

ConvolvedOracle::ConvolvedOracle(OraclePtr base, double r)
    : StochasticGradientOracle(make_traits(base, r)), base_(std::move(base)), r_(r) {}

StochasticGradientOracle::Traits ConvolvedOracle::make_traits(const OraclePtr& base,
                                                              double r) {
  require(base != nullptr, "convolved oracle needs a base oracle");
  require(r > 0.0, "convolution radius must be positive");
  Traits t;
  t.dim = base->dim();
  t.lipschitz_bound = base->traits().lipschitz_bound;  // second moment survives
  // Mean availability is a property of the base kind, probed once here.
  t.has_exact_mean = base->convolved_mean(Vec::Zero(base->dim()), r).has_value();
  return t;
}

Vec ConvolvedOracle::draw(const Vec& x, Rng& rng) const {
  const Vec y = r_ * rng.gaussian_vec(dim());
  return base_->sample_raw(x - y, rng);
}

Vec ConvolvedOracle::mean(const Vec& x) const {
  auto m = base_->convolved_mean(x, r_);
  if (!m) {
    throw capability_error(
        "convolved oracle: base has no closed-form smoothed mean");
  }
  return *m;
}

AcsaParameters acsa_parameters(Eigen::Index d, double lipschitz, double radius,
                               double epsilon) {
  require(d >= 1, "dimension must be >= 1");
  require(lipschitz > 0.0 && radius > 0.0 && epsilon > 0.0,
          "acsa needs L, R, epsilon > 0");
  AcsaParameters p;
  const double dd = static_cast<double>(d);
  double eps = epsilon;
  if (eps > lipschitz * radius) {
    // The feasible ball has objective spread at most L*R.
    p.clamped = true;
    eps = lipschitz * radius;
  }
  p.t_steps = static_cast<int>(
      std::ceil(4.0 * std::pow(dd, 0.25) * lipschitz * radius / eps));
  p.sigma_hat =
      (std::pow(dd, 0.125) / 8.0) * std::sqrt(lipschitz * eps / radius);
  p.r = eps / (4.0 * std::sqrt(dd) * lipschitz);
  p.smoothed_lipschitz = lipschitz / p.r;
  p.gamma = radius * std::sqrt(6.0 * p.smoothed_lipschitz) /
            (std::pow(static_cast<double>(p.t_steps) + 2.0, 1.5) * p.sigma_hat);
  return p;
}

Vec prox_step(const Vec& x_md, const Vec& g, double gamma_t, double lipschitz,
              double r, double radius) {
  require(gamma_t > 0.0 && lipschitz > 0.0 && r > 0.0 && radius > 0.0,
          "prox step needs positive parameters");
  Vec z = x_md - (gamma_t * r / lipschitz) * g;
  const double n = z.norm();
  if (n > radius) z *= radius / n;
  return z;
}

AcsaResult run_acsa(const ProblemInstance& problem, double epsilon,
                    const MeanEstimationBackend& backend, Rng& rng,
                    QueryLedger& ledger) {
  require(problem.oracle != nullptr, "problem has no oracle");
  const double l = problem.lipschitz;
  const double radius = problem.radius;
  const auto d = problem.oracle->dim();
  AcsaResult out;
  const AcsaParameters p = acsa_parameters(d, l, radius, epsilon);
  out.clamped = p.clamped;
  if (p.clamped) {
    out.x = Vec::Zero(d);
    return out;
  }
  auto conv = std::make_shared<ConvolvedOracle>(problem.oracle, p.r);
  Vec x = Vec::Zero(d);
  Vec x_ag = Vec::Zero(d);
  for (int t = 1; t <= p.t_steps; ++t) {
    const double beta_t = (t + 1) / 2.0;
    const double gamma_t = (t + 1) * p.gamma / 2.0;
    const Vec x_md = x / beta_t + (1.0 - 1.0 / beta_t) * x_ag;
    const auto src = gradient_source(conv, x_md, l);
    const Vec g = mlmc_variance_reduce(backend, src, p.sigma_hat, rng, ledger);
    x = prox_step(x_md, g, gamma_t, l, p.r, radius);
    x_ag = x / beta_t + (1.0 - 1.0 / beta_t) * x_ag;
  }
  out.x = x_ag;
  out.iterations = p.t_steps;
  return out;
}

}  // namespace qso
