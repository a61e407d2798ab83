#include "qso/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace qso {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Vec gaussian_noise(double sd, Eigen::Index d, Rng& rng) {
  return (sd / std::sqrt(static_cast<double>(d))) * rng.gaussian_vec(d);
}

// ---- parameter plumbing ----

class ParamReader {
 public:
  explicit ParamReader(const FixtureParams& p) : remaining_(p.extra) {}

  double take(const std::string& key, double fallback) {
    auto it = remaining_.find(key);
    if (it == remaining_.end()) return fallback;
    const double v = it->second;
    remaining_.erase(it);
    return v;
  }

  void finish(const std::string& kind) const {
    if (!remaining_.empty()) {
      throw config_error("fixture '" + kind + "': unknown parameter '" +
                         remaining_.begin()->first + "'");
    }
  }

 private:
  std::map<std::string, double> remaining_;
};

// ---- oracles ----

class LinearOracle final : public StochasticGradientOracle {
 public:
  LinearOracle(Vec c, double noise)
      : StochasticGradientOracle(make_traits(c, noise)),
        c_(std::move(c)),
        noise_(noise) {}

  std::optional<Vec> convolved_mean(const Vec& x, double r) const override {
    (void)x;
    (void)r;
    return c_;  // convolution leaves a constant gradient untouched
  }

  std::optional<Vec> aggregate_draw(const Vec& x, std::uint64_t n,
                                    Rng& rng) const override {
    (void)x;
    if (noise_ == 0.0) return c_;
    return Vec(c_ + gaussian_noise(noise_ / std::sqrt(static_cast<double>(n)),
                                   dim(), rng));
  }

 protected:
  Vec draw(const Vec& x, Rng& rng) const override {
    (void)x;
    if (noise_ == 0.0) return c_;
    return c_ + gaussian_noise(noise_, dim(), rng);
  }
  Vec mean(const Vec& x) const override {
    (void)x;
    return c_;
  }

 private:
  static Traits make_traits(const Vec& c, double noise) {
    Traits t;
    t.dim = c.size();
    t.lipschitz_bound = std::sqrt(c.squaredNorm() + noise * noise);
    t.variance_bound = noise;
    t.has_exact_mean = true;
    return t;
  }

  Vec c_;
  double noise_;
};

class BallDistanceOracle final : public StochasticGradientOracle {
 public:
  BallDistanceOracle(Vec target, double lipschitz, double noise)
      : StochasticGradientOracle(make_traits(target, lipschitz, noise)),
        target_(std::move(target)),
        l_(lipschitz),
        noise_(noise) {}

  Vec subgradient(const Vec& x) const {
    const Vec z = x - target_;
    const double n = z.norm();
    if (n == 0.0) return Vec::Zero(dim());
    return (l_ / n) * z;
  }

  std::optional<Vec> convolved_mean(const Vec& x, double r) const override {
    if (dim() > 2) return std::nullopt;  // tensor quadrature only
    auto grad = [this](const Vec& z) { return subgradient(z); };
    return gauss_hermite_convolved_mean(grad, x, r);
  }

  std::optional<Vec> aggregate_draw(const Vec& x, std::uint64_t n,
                                    Rng& rng) const override {
    Vec m = subgradient(x);
    if (noise_ == 0.0) return m;
    return Vec(m + gaussian_noise(noise_ / std::sqrt(static_cast<double>(n)),
                                  dim(), rng));
  }

 protected:
  Vec draw(const Vec& x, Rng& rng) const override {
    if (noise_ == 0.0) return subgradient(x);
    return subgradient(x) + gaussian_noise(noise_, dim(), rng);
  }
  Vec mean(const Vec& x) const override { return subgradient(x); }

 private:
  static Traits make_traits(const Vec& target, double l, double noise) {
    Traits t;
    t.dim = target.size();
    t.lipschitz_bound = std::sqrt(l * l + noise * noise);
    t.variance_bound = noise;
    t.has_exact_mean = true;
    return t;
  }

  Vec target_;
  double l_;
  double noise_;
};

// f(x) = ||x - a||^2 / 2 with optional x-independent Gaussian noise on the
// gradient. The noise is a pure function of the seed, so shared-seed
// differences cancel it exactly.
class QuadraticOracle final : public StochasticGradientOracle {
 public:
  QuadraticOracle(Vec shift, double radius, double noise, std::uint64_t noise_key)
      : StochasticGradientOracle(make_traits(shift, radius, noise)),
        shift_(std::move(shift)),
        noise_(noise),
        noise_key_(noise_key) {}

  std::optional<Vec> convolved_mean(const Vec& x, double r) const override {
    (void)r;
    return Vec(x - shift_);  // E[x - y - a] = x - a for centered y
  }

  std::optional<Vec> aggregate_draw(const Vec& x, std::uint64_t n,
                                    Rng& rng) const override {
    if (noise_ == 0.0) return Vec(x - shift_);
    return Vec(x - shift_ +
               gaussian_noise(noise_ / std::sqrt(static_cast<double>(n)), dim(),
                              rng));
  }

 protected:
  Vec draw(const Vec& x, Rng& rng) const override {
    if (noise_ == 0.0) return x - shift_;
    return draw_with_seed(x, rng.next_u64());
  }
  Vec draw_with_seed(const Vec& x, std::uint64_t omega) const override {
    if (noise_ == 0.0) return x - shift_;
    Rng nrng(noise_key_, omega);
    return x - shift_ + gaussian_noise(noise_, dim(), nrng);
  }
  Vec mean(const Vec& x) const override { return x - shift_; }

 private:
  static Traits make_traits(const Vec& shift, double radius, double noise) {
    Traits t;
    t.dim = shift.size();
    // Valid on the feasible ball only; unconstrained use relies on variance.
    const double grad_cap = radius + shift.norm();
    t.lipschitz_bound = std::sqrt(grad_cap * grad_cap + noise * noise);
    t.variance_bound = noise;
    t.mean_square_smoothness = 1.0;
    t.has_exact_mean = true;
    t.has_shared_seed = true;
    return t;
  }

  Vec shift_;
  double noise_;
  std::uint64_t noise_key_;
};

// One-dimensional valley with a polynomially flattening slope plus a quadratic
// bowl in the remaining coordinates: critical points are approached but never
// reached, so descent runs keep moving at every scale. Noise is a seeded
// random cosine feature, smooth in x with an exactly known variance.
class ValleyOracle final : public StochasticGradientOracle {
 public:
  ValleyOracle(Eigen::Index d, double c, double beta, double kappa, double sigma,
               double feature_scale, std::uint64_t noise_key)
      : StochasticGradientOracle(
            make_traits(d, c, beta, kappa, sigma, feature_scale)),
        c_(c),
        beta_(beta),
        kappa_(kappa),
        sigma_(sigma),
        sw_(feature_scale),
        noise_key_(noise_key) {}

  double value(const Vec& x) const {
    const double u = x[0];
    double v = u >= 0.0 ? (c_ / beta_) * (std::pow(1.0 + u, -beta_) - 1.0)
                        : -c_ * u;
    for (Eigen::Index i = 1; i < dim(); ++i) v += 0.5 * kappa_ * x[i] * x[i];
    return v;
  }

  Vec gradient(const Vec& x) const {
    Vec g(dim());
    const double u = x[0];
    g[0] = u >= 0.0 ? -c_ * std::pow(1.0 + u, -(1.0 + beta_)) : -c_;
    for (Eigen::Index i = 1; i < dim(); ++i) g[i] = kappa_ * x[i];
    return g;
  }

 protected:
  Vec draw(const Vec& x, Rng& rng) const override {
    if (sigma_ == 0.0) return gradient(x);
    return draw_with_seed(x, rng.next_u64());
  }
  Vec draw_with_seed(const Vec& x, std::uint64_t omega) const override {
    if (sigma_ == 0.0) return gradient(x);
    Rng nrng(noise_key_, omega);
    const Vec w = sw_ * nrng.gaussian_vec(dim());
    const double b = kTwoPi * nrng.next_double();
    const Vec u = nrng.unit_vec(dim());
    const double amp = sigma_ * std::sqrt(2.0) * std::cos(w.dot(x) + b);
    return gradient(x) + amp * u;
  }
  Vec mean(const Vec& x) const override { return gradient(x); }

 private:
  static Traits make_traits(Eigen::Index d, double c, double beta, double kappa,
                            double sigma, double sw) {
    Traits t;
    t.dim = d;
    t.variance_bound = sigma;
    const double smooth = std::max(c * (1.0 + beta), kappa);
    t.mean_square_smoothness =
        std::sqrt(smooth * smooth + 4.0 * sigma * sigma * sw * sw);
    t.has_exact_mean = true;
    t.has_shared_seed = true;
    return t;
  }

  double c_, beta_, kappa_, sigma_, sw_;
  std::uint64_t noise_key_;
};

class HardInstanceOracle final : public StochasticGradientOracle {
 public:
  explicit HardInstanceOracle(std::shared_ptr<const HardInstance> inst)
      : StochasticGradientOracle(make_traits(*inst)), inst_(std::move(inst)) {}

  std::optional<Vec> aggregate_draw(const Vec& x, std::uint64_t n,
                                    Rng& rng) const override {
    // Distribution-exact mean of n uniform (i,j) picks: multinomial row
    // counts, then a binomial split per row into +/- sign groups.
    const Eigen::Index d = inst_->rows();
    const Eigen::Index m = inst_->cols();
    auto eng = rng.engine();
    Vec signed_sum = Vec::Zero(d);
    std::int64_t remaining = static_cast<std::int64_t>(n);
    for (Eigen::Index i = 0; i < d && remaining > 0; ++i) {
      std::int64_t row_n = remaining;
      if (i + 1 < d) {
        std::binomial_distribution<std::int64_t> pick(
            remaining, 1.0 / static_cast<double>(d - i));
        row_n = pick(eng);
      }
      remaining -= row_n;
      if (row_n == 0) continue;
      const double weight = inst_->a.row(i).sum();
      std::binomial_distribution<std::int64_t> split(
          row_n, weight / static_cast<double>(m));
      const std::int64_t plus = split(eng);
      signed_sum[i] = static_cast<double>(2 * plus - row_n);
    }
    Vec g_mean = (inst_->scale / static_cast<double>(n)) * signed_sum;
    Vec out = (-1.0 / 3.0) * g_mean;
    if (x.norm() > inst_->radius / 2.0) {
      out += (2.0 * inst_->lipschitz / 3.0) * (x / x.norm());
    }
    return out;
  }

 protected:
  Vec draw(const Vec& x, Rng& rng) const override {
    const std::uint64_t idx = rng.next_below(
        static_cast<std::uint64_t>(inst_->rows() * inst_->cols()));
    const Eigen::Index i = static_cast<Eigen::Index>(idx) / inst_->cols();
    const Eigen::Index j = static_cast<Eigen::Index>(idx) % inst_->cols();
    return inst_->subgradient(i, j, x);
  }
  Vec mean(const Vec& x) const override { return inst_->mean_subgradient(x); }

 private:
  static Traits make_traits(const HardInstance& inst) {
    Traits t;
    t.dim = inst.rows();
    t.lipschitz_bound = inst.lipschitz;
    t.has_exact_mean = true;
    return t;
  }

  std::shared_ptr<const HardInstance> inst_;
};

template <typename T>
void shuffle_with(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.next_below(i)]);
  }
}

}  // namespace

// ---- hard instance ----

Vec HardInstance::g(Eigen::Index i, Eigen::Index j) const {
  Vec v = Vec::Zero(rows());
  v[i] = a(i, j) == 1.0 ? scale : -scale;
  return v;
}

Vec HardInstance::subgradient(Eigen::Index i, Eigen::Index j, const Vec& x) const {
  Vec out = (-1.0 / 3.0) * g(i, j);
  if (x.norm() > radius / 2.0) out += (2.0 * lipschitz / 3.0) * (x / x.norm());
  return out;
}

Vec HardInstance::mean_subgradient(const Vec& x) const {
  Vec out = (-1.0 / 3.0) * gbar;
  if (x.norm() > radius / 2.0) out += (2.0 * lipschitz / 3.0) * (x / x.norm());
  return out;
}

double HardInstance::objective(const Vec& x) const {
  return (-1.0 / 3.0) * x.dot(gbar) +
         (2.0 * lipschitz / 3.0) * std::max(0.0, x.norm() - radius / 2.0);
}

std::optional<Vec> HardInstance::minimizer() const {
  const double n = gbar.norm();
  if (n == 0.0) return std::nullopt;
  return Vec((radius / 2.0 / n) * gbar);
}

HardInstance make_hard_instance(Eigen::Index d, Eigen::Index m, double lipschitz,
                                double radius, Rng& rng) {
  require(d >= 1 && m >= 1, "hard instance needs d >= 1 and m >= 1");
  require(lipschitz > 0.0 && radius > 0.0, "hard instance needs L, R > 0");
  // Half the rows (rounded down) carry weight floor(m/2), the rest one more;
  // the trial RNG shuffles both the row order and each row's bit positions.
  const Eigen::Index low_rows = d / 2;
  const Eigen::Index low_weight = m / 2;
  std::vector<Eigen::Index> weights(static_cast<std::size_t>(d), low_weight + 1);
  std::fill(weights.begin(), weights.begin() + low_rows, low_weight);
  shuffle_with(weights, rng);

  HardInstance inst;
  inst.a = Mat::Zero(d, m);
  inst.lipschitz = lipschitz;
  inst.radius = radius;
  const double md = static_cast<double>(m);
  inst.scale = lipschitz * md / std::sqrt(4.0 * md * md - 1.0);
  inst.b = Vec::Zero(d);
  std::vector<Eigen::Index> cols(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) cols[static_cast<std::size_t>(j)] = j;
    shuffle_with(cols, rng);
    for (Eigen::Index k = 0; k < weights[static_cast<std::size_t>(i)]; ++k) {
      inst.a(i, cols[static_cast<std::size_t>(k)]) = 1.0;
    }
    inst.b[i] = weights[static_cast<std::size_t>(i)] == low_weight ? 0.0 : 1.0;
  }
  inst.gbar = Vec(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double w = inst.a.row(i).sum();
    inst.gbar[i] = inst.scale * (2.0 * w - md) / (static_cast<double>(d) * md);
  }
  return inst;
}

// ---- fixture factory ----

ProblemInstance make_fixture(const std::string& kind, Eigen::Index d,
                             const FixtureParams& params, Rng& rng) {
  require(d >= 1, "fixture dimension must be >= 1");
  require(params.lipschitz > 0.0, "fixture needs lipschitz > 0");
  require(params.radius > 0.0, "fixture needs radius > 0");
  ParamReader reader(params);
  ProblemInstance inst;
  inst.kind = kind;
  inst.radius = params.radius;
  inst.lipschitz = params.lipschitz;

  if (kind == "linear") {
    const double noise = reader.take("noise", 0.0);
    reader.finish(kind);
    Vec c = Vec::Zero(d);
    c[0] = params.lipschitz;
    auto oracle = std::make_shared<LinearOracle>(c, noise);
    inst.oracle = oracle;
    inst.lipschitz = *oracle->traits().lipschitz_bound;
    inst.variance = noise;
    inst.objective = [c](const Vec& x) { return c.dot(x); };
    inst.gradient = [c](const Vec&) { return c; };
    inst.optimum_value = -c.norm() * params.radius;
    Vec xs = -(params.radius / c.norm()) * c;
    inst.minimizer = xs;
    return inst;
  }

  if (kind == "ball-distance") {
    const double noise = reader.take("noise", 0.0);
    Vec target = Vec::Zero(d);
    target[0] = reader.take("shift_x", 0.3);
    if (d >= 2) target[1] = reader.take("shift_y", -0.2);
    reader.finish(kind);
    require(target.norm() <= params.radius, "ball-distance target outside ball");
    const double l0 = params.lipschitz;
    auto oracle = std::make_shared<BallDistanceOracle>(target, l0, noise);
    inst.oracle = oracle;
    inst.lipschitz = *oracle->traits().lipschitz_bound;
    inst.variance = noise;
    inst.objective = [target, l0](const Vec& x) {
      return l0 * (x - target).norm();
    };
    inst.gradient = [oracle](const Vec& x) { return oracle->exact_mean(x); };
    inst.optimum_value = 0.0;
    inst.minimizer = target;
    return inst;
  }

  if (kind == "quadratic" || kind == "quadratic-noisy") {
    const double noise = reader.take("noise", kind == "quadratic" ? 0.0 : 1.0);
    const double shift = reader.take("shift", 0.0);
    reader.finish(kind);
    Vec a = Vec::Zero(d);
    a[0] = shift;
    auto oracle =
        std::make_shared<QuadraticOracle>(a, params.radius, noise, rng.next_u64());
    inst.oracle = oracle;
    inst.lipschitz = *oracle->traits().lipschitz_bound;
    inst.smoothness = 1.0;
    inst.variance = noise;
    inst.gap_bound = 0.5 * a.squaredNorm();
    inst.objective = [a](const Vec& x) { return 0.5 * (x - a).squaredNorm(); };
    inst.gradient = [a](const Vec& x) { return Vec(x - a); };
    if (a.norm() <= params.radius) {
      inst.optimum_value = 0.0;
      inst.minimizer = a;
    } else {
      const double slack = a.norm() - params.radius;
      inst.optimum_value = 0.5 * slack * slack;
      inst.minimizer = Vec((params.radius / a.norm()) * a);
    }
    return inst;
  }

  if (kind == "seeded-smooth-nonconvex") {
    const double c = reader.take("c", 1.5);
    const double beta = reader.take("beta", 0.3);
    const double kappa = reader.take("kappa", 1.0);
    const double sigma = reader.take("noise", 1.0);
    const double sw = reader.take("feature_scale", 1.0);
    reader.finish(kind);
    require(c > 0.0 && beta > 0.0 && kappa > 0.0 && sigma >= 0.0 && sw >= 0.0,
            "seeded-smooth-nonconvex needs c, beta, kappa > 0 and noise, "
            "feature_scale >= 0");
    auto oracle = std::make_shared<ValleyOracle>(d, c, beta, kappa, sigma, sw,
                                                 rng.next_u64());
    inst.oracle = oracle;
    inst.smoothness = oracle->traits().mean_square_smoothness;
    inst.variance = sigma;
    inst.gap_bound = c / beta;
    inst.objective = [oracle](const Vec& x) { return oracle->value(x); };
    inst.gradient = [oracle](const Vec& x) { return oracle->gradient(x); };
    return inst;
  }

  if (kind == "hard-instance") {
    const auto m = static_cast<Eigen::Index>(reader.take("columns", 8.0));
    reader.finish(kind);
    auto hard = std::make_shared<HardInstance>(
        make_hard_instance(d, m, params.lipschitz, params.radius, rng));
    inst.hard = hard;
    inst.oracle = std::make_shared<HardInstanceOracle>(hard);
    inst.objective = [hard](const Vec& x) { return hard->objective(x); };
    inst.gradient = [hard](const Vec& x) { return hard->mean_subgradient(x); };
    if (auto xs = hard->minimizer()) {
      inst.minimizer = *xs;
      inst.optimum_value = hard->objective(*xs);
    }
    return inst;
  }

  throw config_error("unknown fixture kind '" + kind + "'");
}

// ---- offline truth ----

namespace {

MonteCarloVec summarize(const Vec& sum, double sq_norm_sum, std::uint64_t n) {
  MonteCarloVec out;
  out.value = sum / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const double var_total =
      std::max(0.0, (sq_norm_sum - nn * out.value.squaredNorm()) / (nn - 1.0));
  out.std_error = std::sqrt(var_total / nn);
  return out;
}

}  // namespace

MonteCarloVec offline_mean(const StochasticGradientOracle& oracle, const Vec& x,
                           std::uint64_t n, Rng& rng) {
  require(n >= 1000, "offline truth needs at least 1000 samples");
  Vec sum = Vec::Zero(oracle.dim());
  double sq = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Vec g = oracle.sample_raw(x, rng);
    sum += g;
    sq += g.squaredNorm();
  }
  return summarize(sum, sq, n);
}

MonteCarloScalar offline_convolved_value(const std::function<double(const Vec&)>& f,
                                         const Vec& x, double r, std::uint64_t n,
                                         Rng& rng) {
  require(n >= 1000, "offline truth needs at least 1000 samples");
  require(r > 0.0, "convolution radius must be positive");
  double sum = 0.0, sq = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double v = f(x - r * rng.gaussian_vec(x.size()));
    sum += v;
    sq += v * v;
  }
  MonteCarloScalar out;
  const double nn = static_cast<double>(n);
  out.value = sum / nn;
  out.std_error =
      std::sqrt(std::max(0.0, (sq - nn * out.value * out.value) / (nn - 1.0)) / nn);
  return out;
}

MonteCarloVec offline_convolved_gradient(const StochasticGradientOracle& oracle,
                                         const Vec& x, double r, std::uint64_t n,
                                         Rng& rng) {
  require(n >= 1000, "offline truth needs at least 1000 samples");
  require(r > 0.0, "convolution radius must be positive");
  Vec sum = Vec::Zero(oracle.dim());
  double sq = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Vec g = oracle.sample_raw(x - r * rng.gaussian_vec(oracle.dim()), rng);
    sum += g;
    sq += g.squaredNorm();
  }
  return summarize(sum, sq, n);
}

// ---- quadrature ----

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  require(n >= 1, "quadrature order must be >= 1");
  Mat jac = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(k / 2.0);
    jac(k, k - 1) = off;
    jac(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jac);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  const double sqrt_pi = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = sqrt_pi * v0 * v0;
  }
}

Vec gauss_hermite_convolved_mean(const std::function<Vec(const Vec&)>& grad,
                                 const Vec& x, double r) {
  require(r > 0.0, "convolution radius must be positive");
  static const int kOrder = 48;
  static const auto tables = [] {
    std::pair<std::vector<double>, std::vector<double>> t;
    gauss_hermite(kOrder, t.first, t.second);
    return t;
  }();
  const auto& t = tables.first;
  const auto& w = tables.second;
  const double s = std::sqrt(2.0) * r;
  const auto d = x.size();
  if (d == 1) {
    Vec acc = Vec::Zero(1);
    for (int i = 0; i < kOrder; ++i) {
      Vec z(1);
      z[0] = x[0] - s * t[static_cast<std::size_t>(i)];
      acc += w[static_cast<std::size_t>(i)] * grad(z);
    }
    return acc / std::sqrt(M_PI);
  }
  require(d == 2, "tensor quadrature supports d <= 2 only");
  Vec acc = Vec::Zero(2);
  for (int i = 0; i < kOrder; ++i) {
    for (int j = 0; j < kOrder; ++j) {
      Vec z(2);
      z[0] = x[0] - s * t[static_cast<std::size_t>(i)];
      z[1] = x[1] - s * t[static_cast<std::size_t>(j)];
      acc += (w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)]) *
             grad(z);
    }
  }
  return acc / M_PI;
}

}  // namespace qso
