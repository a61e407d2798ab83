#pragma once

#include <vector>

#include "qso/fixtures.hpp"
#include "qso/mean_estimation.hpp"

namespace qso {

struct SeparationResponse {
  Vec point;
  Vec direction;  // zero means "feasible, stop cutting"
};

// Central-cut ellipsoid localizer, started on the ball of the given radius.
// In one dimension it degenerates to interval bisection.
class CuttingPlaneEngine {
 public:
  CuttingPlaneEngine(Eigen::Index d, double outer_radius);

  const Vec& center() const { return center_; }
  Eigen::Index dim() const { return center_.size(); }

  // Cut away the half-space {z : <direction, z - center> > 0} through the
  // current center and move to the center of the successor ellipsoid.
  const Vec& cut(const Vec& direction);

  // Guaranteed per-cut volume shrink factor.
  double volume_factor() const;

  // Determinant-based ellipsoid volume relative to the starting ball.
  double volume_ratio() const;

 private:
  Vec center_;
  Mat shape_;          // P; in d=1, P(0,0) is the squared half-length
  double log_det0_;    // log det P at construction
};

// Cuts needed to guarantee penetration of a radius-r_k ball inside the
// starting ball, by the volume argument.
std::uint64_t scp_cut_budget(Eigen::Index d, double outer_radius, double r_k);

struct ScpCandidates {
  std::vector<Vec> points;
  std::uint64_t cuts = 0;
  bool degraded = false;
};

// Separation-oracle loop driven by approximate gradients: localizes the
// epsilon-optimal set over the ball of radius 2R, collecting every queried
// center. One of the returned points is epsilon-optimal with probability
// >= 5/6 when every gradient call meets its bound.
ScpCandidates run_scp_candidates(const ProblemInstance& problem, double epsilon,
                                 const MeanEstimationBackend& backend, Rng& rng,
                                 QueryLedger& ledger);

}  // namespace qso
