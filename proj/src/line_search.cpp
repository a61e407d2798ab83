#include "qso/line_search.hpp"

#include <bit>
#include <cmath>

namespace qso {

RandomVariableSource directional_source(const OraclePtr& oracle, const Vec& x,
                                        const Vec& direction, double l_eff) {
  require(oracle != nullptr, "directional source needs an oracle");
  require(direction.size() == oracle->dim(), "direction has wrong dimension");
  RandomVariableSource src;
  src.dim = 1;
  src.second_moment_bound = l_eff;
  Vec point = x;
  Vec dir = direction;
  src.draw = [oracle, point, dir](Rng& rng, QueryLedger& ledger) {
    Vec out(1);
    out[0] = dir.dot(oracle->sample(point, rng, ledger));
    return out;
  };
  src.draw_mean = [oracle, point, dir](std::uint64_t n, Rng& rng,
                                       QueryLedger& ledger) {
    Vec out(1);
    if (auto agg = oracle->aggregate_draw(point, n, rng)) {
      ledger.add_classical(n);
      out[0] = dir.dot(*agg);
      return out;
    }
    double acc = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      acc += dir.dot(oracle->sample(point, rng, ledger));
    }
    out[0] = acc / static_cast<double>(n);
    return out;
  };
  if (oracle->traits().has_exact_mean) {
    Vec m(1);
    m[0] = dir.dot(oracle->exact_mean(point));
    src.exact_mean = m;
  }
  return src;
}

Vec stochastic_line_search(const OraclePtr& oracle, double lipschitz, Vec y_l,
                           Vec y_r, double eps_prime, double radius,
                           std::uint64_t tournament_size,
                           const MeanEstimationBackend& backend, Rng& rng,
                           QueryLedger& ledger) {
  require(oracle != nullptr, "line search needs an oracle");
  require(y_l.size() == y_r.size(), "endpoint dimensions differ");
  require(eps_prime > 0.0 && radius > 0.0 && lipschitz > 0.0,
          "line search needs positive eps_prime, radius, lipschitz");
  require(tournament_size >= 1, "tournament size must be >= 1");
  if (y_l == y_r) return y_l;
  const Vec e = (y_r - y_l) / (y_r - y_l).norm();  // fixed for the whole search
  const double iter_bound =
      std::max(std::log2(2.0 * radius * lipschitz / eps_prime), 1.0);
  const double xi =
      1.0 / (6.0 * static_cast<double>(tournament_size) * iter_bound);
  const double accept = eps_prime / (4.0 * radius);
  while ((y_r - y_l).norm() > eps_prime / lipschitz) {
    const Vec y_m = 0.5 * (y_l + y_r);
    const auto src = directional_source(oracle, y_m, e, lipschitz);
    const double g = approx_gradient(backend, src, accept, xi, rng, ledger).value[0];
    if (std::abs(g) <= accept) return y_m;  // ties accept
    if (g > 0.0) {
      y_r = y_m;
    } else {
      y_l = y_m;
    }
  }
  return y_l;
}

Vec best_point_tournament(const OraclePtr& oracle, double lipschitz,
                          const std::vector<Vec>& points, double epsilon,
                          double radius, const MeanEstimationBackend& backend,
                          Rng& rng, QueryLedger& ledger) {
  require(!points.empty(), "tournament needs at least one point");
  require(epsilon > 0.0, "epsilon must be positive");
  std::size_t size = 1;
  while (size < points.size()) size *= 2;
  if (size == 1) return points.front();
  std::vector<Vec> level = points;
  // Padding with copies of the first point costs nothing: identical-endpoint
  // matches short-circuit inside the line search.
  level.resize(size, points.front());
  const auto levels = static_cast<double>(std::countr_zero(size));
  const double eps_prime = epsilon / levels;
  while (level.size() > 1) {
    std::vector<Vec> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      next.push_back(stochastic_line_search(oracle, lipschitz, level[i],
                                            level[i + 1], eps_prime, radius,
                                            size, backend, rng, ledger));
    }
    level = std::move(next);
  }
  return level.front();
}

QscpResult run_qscp(const ProblemInstance& problem, double epsilon,
                    const MeanEstimationBackend& backend, Rng& rng,
                    QueryLedger& ledger) {
  QscpResult out;
  ScpCandidates cands;
  {
    PhaseScope phase(ledger, "scp");
    cands = run_scp_candidates(problem, epsilon, backend, rng, ledger);
  }
  out.candidate_count = cands.points.size();
  out.degraded = cands.degraded;
  {
    PhaseScope phase(ledger, "tournament");
    out.x = best_point_tournament(problem.oracle, problem.lipschitz, cands.points,
                                  epsilon, 2.0 * problem.radius, backend, rng,
                                  ledger);
  }
  return out;
}

}  // namespace qso
