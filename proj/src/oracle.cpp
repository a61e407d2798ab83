#include "qso/oracle.hpp"

namespace qso {

Vec source_mean_of(const RandomVariableSource& src, std::uint64_t n, Rng& rng,
                   QueryLedger& ledger) {
  require(n >= 1, "source_mean_of: n must be >= 1");
  if (src.draw_mean) return src.draw_mean(n, rng, ledger);
  Vec acc = Vec::Zero(src.dim);
  for (std::uint64_t i = 0; i < n; ++i) acc += src.draw(rng, ledger);
  return acc / static_cast<double>(n);
}

RandomVariableSource gradient_source(const OraclePtr& oracle, const Vec& x,
                                     std::optional<double> l_eff) {
  const auto& t = oracle->traits();
  double bound;
  if (l_eff) {
    bound = *l_eff;
  } else if (t.lipschitz_bound) {
    bound = *t.lipschitz_bound;
  } else if (t.variance_bound) {
    bound = *t.variance_bound;
  } else {
    throw capability_error("gradient_source: oracle declares no deviation bound");
  }
  RandomVariableSource src;
  src.dim = t.dim;
  src.second_moment_bound = bound;
  Vec point = x;
  src.draw = [oracle, point](Rng& rng, QueryLedger& ledger) {
    return oracle->sample(point, rng, ledger);
  };
  src.draw_mean = [oracle, point](std::uint64_t n, Rng& rng, QueryLedger& ledger) {
    if (auto agg = oracle->aggregate_draw(point, n, rng)) {
      ledger.add_classical(n);
      return *agg;
    }
    Vec acc = Vec::Zero(point.size());
    for (std::uint64_t i = 0; i < n; ++i) acc += oracle->sample(point, rng, ledger);
    return Vec(acc / static_cast<double>(n));
  };
  if (t.has_exact_mean) src.exact_mean = oracle->exact_mean(x);
  return src;
}

}  // namespace qso
