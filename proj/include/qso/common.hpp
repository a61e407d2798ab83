#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qso {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Raised when an oracle or backend is asked for a capability it does not declare
// (e.g. an exact-mean channel on a sample-only source).
struct capability_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Raised when a caller violates a stated estimator contract (e.g. sigma_hat > L).
struct contract_violation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when geometry collapses numerically (singular ellipsoid, zero direction).
struct numeric_degeneracy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by the bench layer for malformed config files / flag combinations.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace qso
