#pragma once

#include <vector>

#include "qso/cutting_plane.hpp"

namespace qso {

// The gradient component along a fixed unit direction, as a one-dimensional
// random variable. Charged at dim 1, so directional estimates avoid the
// sqrt(d) factor of full-vector estimation.
RandomVariableSource directional_source(const OraclePtr& oracle, const Vec& x,
                                        const Vec& direction, double l_eff);

// Noisy bisection along the segment [y_l, y_r]: returns a point whose value is
// within eps_prime of the best point on the segment (with probability
// 1 - 1/(6*tournament_size)), using sign estimates of the directional
// derivative at midpoints.
Vec stochastic_line_search(const OraclePtr& oracle, double lipschitz, Vec y_l,
                           Vec y_r, double eps_prime, double radius,
                           std::uint64_t tournament_size,
                           const MeanEstimationBackend& backend, Rng& rng,
                           QueryLedger& ledger);

// Pairwise single-elimination reduction of a candidate list via line searches;
// the result is a convex combination of the inputs with value within epsilon
// of the best input, with probability >= 5/6.
Vec best_point_tournament(const OraclePtr& oracle, double lipschitz,
                          const std::vector<Vec>& points, double epsilon,
                          double radius, const MeanEstimationBackend& backend,
                          Rng& rng, QueryLedger& ledger);

struct QscpResult {
  Vec x;
  std::uint64_t candidate_count = 0;
  bool degraded = false;
};

// Full pipeline: cutting-plane candidate generation ("scp" ledger phase)
// followed by the tournament ("tournament" phase). Candidates live in the
// 2R ball, so the tournament runs at that radius.
QscpResult run_qscp(const ProblemInstance& problem, double epsilon,
                    const MeanEstimationBackend& backend, Rng& rng,
                    QueryLedger& ledger);

}  // namespace qso
