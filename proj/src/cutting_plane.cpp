#include "qso/cutting_plane.hpp"

#include <cmath>

namespace qso {

CuttingPlaneEngine::CuttingPlaneEngine(Eigen::Index d, double outer_radius) {
  require(d >= 1, "dimension must be >= 1");
  require(outer_radius > 0.0, "outer radius must be positive");
  center_ = Vec::Zero(d);
  shape_ = outer_radius * outer_radius * Mat::Identity(d, d);
  log_det0_ = 2.0 * static_cast<double>(d) * std::log(outer_radius);
}

const Vec& CuttingPlaneEngine::cut(const Vec& direction) {
  require(direction.size() == dim(), "cut direction has wrong dimension");
  if (!(direction.norm() > 0.0))
    throw numeric_degeneracy("cut direction must be nonzero");
  const auto d = dim();
  if (d == 1) {
    const double half = 0.5 * std::sqrt(shape_(0, 0));
    center_[0] += direction[0] > 0.0 ? -half : half;
    shape_(0, 0) = half * half;
    return center_;
  }
  const double n = static_cast<double>(d);
  const Vec pc = shape_ * direction;
  const double denom = direction.dot(pc);
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw numeric_degeneracy("ellipsoid shape matrix lost positive definiteness");
  }
  const Vec g = pc / std::sqrt(denom);
  center_ -= g / (n + 1.0);
  shape_ = (n * n / (n * n - 1.0)) *
           (shape_ - (2.0 / (n + 1.0)) * (g * g.transpose()));
  shape_ = 0.5 * (shape_ + shape_.transpose()).eval();
  if (!shape_.allFinite() || shape_.diagonal().minCoeff() <= 0.0) {
    throw numeric_degeneracy("ellipsoid shape matrix lost positive definiteness");
  }
  return center_;
}

double CuttingPlaneEngine::volume_factor() const {
  return std::exp(-1.0 / (2.0 * (static_cast<double>(dim()) + 1.0)));
}

double CuttingPlaneEngine::volume_ratio() const {
  double log_det = 0.0;
  if (dim() == 1) {
    log_det = std::log(shape_(0, 0));
  } else {
    Eigen::LLT<Mat> llt(shape_);
    if (llt.info() != Eigen::Success) {
      throw numeric_degeneracy("ellipsoid shape matrix is not positive definite");
    }
    log_det = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
  }
  return std::exp(0.5 * (log_det - log_det0_));
}

std::uint64_t scp_cut_budget(Eigen::Index d, double outer_radius, double r_k) {
  require(d >= 1 && outer_radius > 0.0 && r_k > 0.0,
          "cut budget needs positive geometry");
  const double n = static_cast<double>(d);
  const double lg = std::log(outer_radius / r_k);
  if (lg <= 0.0) return 1;
  return static_cast<std::uint64_t>(std::ceil(2.0 * (n + 1.0) * n * lg)) + 1;
}

ScpCandidates run_scp_candidates(const ProblemInstance& problem, double epsilon,
                                 const MeanEstimationBackend& backend, Rng& rng,
                                 QueryLedger& ledger) {
  require(problem.oracle != nullptr, "problem has no oracle");
  require(epsilon > 0.0, "epsilon must be positive");
  const double l = problem.lipschitz;
  const double radius = problem.radius;
  const auto d = problem.oracle->dim();
  ScpCandidates out;
  if (epsilon >= l * radius) {
    // Any feasible point is epsilon-optimal; the origin stands alone.
    out.points.push_back(Vec::Zero(d));
    return out;
  }
  const double outer = 2.0 * radius;
  const double r_k = epsilon / (2.0 * l);
  const std::uint64_t budget = scp_cut_budget(d, outer, r_k);
  const double xi = 1.0 / (6.0 * static_cast<double>(budget));
  const double delta_err = epsilon / (10.0 * radius);
  CuttingPlaneEngine engine(d, outer);
  while (out.cuts < budget) {
    Vec direction;
    const Vec x = engine.center();
    if (x.norm() > outer) {
      direction = x;  // ball cut: recenter without spending gradient queries
    } else {
      const auto src = gradient_source(problem.oracle, x, l);
      const GradientEstimate g =
          approx_gradient(backend, src, delta_err, xi, rng, ledger);
      out.points.push_back(x);
      if (g.degraded) out.degraded = true;
      if (g.value.norm() == 0.0) break;  // no direction to cut along
      direction = g.value;
    }
    try {
      engine.cut(direction);
    } catch (const numeric_degeneracy&) {
      out.degraded = true;
      break;
    }
    ++out.cuts;
  }
  return out;
}

}  // namespace qso
