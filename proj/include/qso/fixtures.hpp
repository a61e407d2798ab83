#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "qso/oracle.hpp"

namespace qso {

// Adversarially structured convex instance: f(x) = -(1/3)<x, g_ij> averaged
// over a 0/1 matrix's entries, plus a hinge keeping minimizers near the R/2
// sphere. Row Hamming weights split between floor(m/2) and floor(m/2)+1, so
// the average gradient encodes which rows are heavy.
struct HardInstance {
  Mat a;             // 0/1 entries, d rows, m columns
  double lipschitz;  // L
  double radius;     // R
  double scale;      // ||g_ij|| = L*m/sqrt(4m^2-1)
  Vec b;             // per-row heavy-weight indicator
  Vec gbar;          // average of the g_ij

  Eigen::Index rows() const { return a.rows(); }
  Eigen::Index cols() const { return a.cols(); }

  Vec g(Eigen::Index i, Eigen::Index j) const;
  Vec subgradient(Eigen::Index i, Eigen::Index j, const Vec& x) const;
  Vec mean_subgradient(const Vec& x) const;
  double objective(const Vec& x) const;
  std::optional<Vec> minimizer() const;  // (R/2) gbar/||gbar||, if gbar != 0
};

HardInstance make_hard_instance(Eigen::Index d, Eigen::Index m, double lipschitz,
                                double radius, Rng& rng);

struct FixtureParams {
  double lipschitz = 1.0;
  double radius = 1.0;
  // Kind-specific knobs (noise, shift_x, shift_y, c, beta, kappa,
  // feature_scale, columns); unknown keys are rejected.
  std::map<std::string, double> extra;
};

struct ProblemInstance {
  std::string kind;
  OraclePtr oracle;
  double radius = 1.0;
  double lipschitz = 1.0;
  std::optional<double> smoothness;  // gradient Lipschitz constant
  std::optional<double> variance;
  std::optional<double> gap_bound;  // f(0) - inf f
  std::function<double(const Vec&)> objective;
  std::function<Vec(const Vec&)> gradient;
  std::optional<double> optimum_value;
  std::optional<Vec> minimizer;
  std::shared_ptr<const HardInstance> hard;
};

// kinds: linear, ball-distance, quadratic, quadratic-noisy,
// seeded-smooth-nonconvex, hard-instance
ProblemInstance make_fixture(const std::string& kind, Eigen::Index d,
                             const FixtureParams& params, Rng& rng);

struct MonteCarloScalar {
  double value = 0.0;
  double std_error = 0.0;
};
struct MonteCarloVec {
  Vec value;
  double std_error = 0.0;  // sqrt(sum of per-coordinate variances of the mean)
};

// Brute-force reference estimates for tests; these never touch a QueryLedger.
MonteCarloVec offline_mean(const StochasticGradientOracle& oracle, const Vec& x,
                           std::uint64_t n, Rng& rng);
MonteCarloScalar offline_convolved_value(const std::function<double(const Vec&)>& f,
                                         const Vec& x, double r, std::uint64_t n,
                                         Rng& rng);
MonteCarloVec offline_convolved_gradient(const StochasticGradientOracle& oracle,
                                         const Vec& x, double r, std::uint64_t n,
                                         Rng& rng);

// Nodes/weights for integrating against exp(-t^2) (sum of weights = sqrt(pi)).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor-quadrature evaluation of E_{y ~ N(0, r^2 I)}[grad(x - y)], exact
// enough for truth channels in d <= 2; higher d is not supported.
Vec gauss_hermite_convolved_mean(const std::function<Vec(const Vec&)>& grad,
                                 const Vec& x, double r);

}  // namespace qso
