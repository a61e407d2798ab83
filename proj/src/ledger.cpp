#include "qso/ledger.hpp"

#include <cmath>

namespace qso {

std::uint64_t charge_cost(QueryLedger& ledger, double l_eff, double sigma_hat,
                          double delta, int dim, double c_qme) {
  require(sigma_hat > 0.0, "charge_cost: sigma_hat must be positive");
  require(delta > 0.0 && delta <= 1.0, "charge_cost: delta must lie in (0, 1]");
  require(dim >= 1, "charge_cost: dim must be >= 1");
  require(l_eff >= 0.0, "charge_cost: l_eff must be nonnegative");
  require(c_qme > 0.0, "charge_cost: c_qme must be positive");
  const double log_factor = std::max(1.0, std::log(1.0 / delta));
  const double q = std::ceil(c_qme * (l_eff * std::sqrt(static_cast<double>(dim)) / sigma_hat) * log_factor);
  const auto charge = static_cast<std::uint64_t>(q);
  ledger.add_quantum(charge);
  return charge;
}

}  // namespace qso
