#pragma once

#include "qso/fixtures.hpp"
#include "qso/mean_estimation.hpp"

namespace qso {

struct QsgdResult {
  Vec x;
  std::uint64_t steps = 0;  // the uniformly drawn stopping index
};

// Variance-reduced SGD with a uniformly random stopping time; the returned
// iterate is an expected epsilon-critical point of a smooth objective.
QsgdResult run_qsgd(const ProblemInstance& problem, double epsilon,
                    const MeanEstimationBackend& backend, Rng& rng,
                    QueryLedger& ledger);

struct QspiderResult {
  Vec x;
  std::uint64_t steps = 0;
  bool early = false;  // stopped on the small-estimate test, not the budget
  // max over the trajectory of | ||x_{t+1}-x_t|| - epsilon/ell |; the update
  // normalizes, so anything above rounding error is a bug.
  double max_step_error = 0.0;
};

// Normalized-step SPIDER walk: periodic full-gradient anchors plus shared-seed
// difference estimates between consecutive iterates. Requires a shared-seed
// oracle with declared mean-square smoothness, and epsilon <= the oracle's
// variance bound.
QspiderResult run_qspider(const ProblemInstance& problem, double epsilon,
                          const MeanEstimationBackend& backend, Rng& rng,
                          QueryLedger& ledger);

struct SgdResult {
  Vec x;
  std::uint64_t steps = 0;
};

// Classical projected SGD on the feasible ball, returning the averaged
// iterate. Every draw is charged one modeled query, giving the classical
// 1/epsilon^2 reference line for the sweep comparisons.
SgdResult run_sgd_baseline(const ProblemInstance& problem, double epsilon,
                           Rng& rng, QueryLedger& ledger);

}  // namespace qso
