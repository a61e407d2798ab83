#include "qso/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qso/acsa.hpp"
#include "qso/line_search.hpp"
#include "qso/nonconvex.hpp"

namespace qso {
namespace {

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> algs = {
      "qvr", "acsa", "qscp", "qsgd", "qspider", "sgd-baseline"};
  return algs;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: bad number for '" + key + "': " + value);
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: bad integer for '" + key + "': " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: bad unsigned integer for '" + key + "': " + value);
  }
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw config_error("config: bad flag for '" + key + "': " + value);
}

std::vector<double> parse_grid(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (in >> item) {
    if (!item.empty() && item.back() == ',') item.pop_back();
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

void apply_experiment_key(ExperimentConfig& cfg, const std::string& key,
                          const std::string& value) {
  if (key == "algorithm") {
    cfg.algorithm = value;
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(parse_int(key, value));
  } else if (key == "backend") {
    if (value == "contract") {
      cfg.backend.mode = BackendMode::contract;
    } else if (value == "sample") {
      cfg.backend.mode = BackendMode::sample_based;
    } else {
      throw config_error("config: backend must be contract or sample, got " + value);
    }
  } else if (key == "noise") {
    if (value == "honest") {
      cfg.backend.noise = NoisePolicy::honest_gaussian_clipped;
    } else if (value == "adversarial") {
      cfg.backend.noise = NoisePolicy::adversarial_boundary;
    } else {
      throw config_error("config: noise must be honest or adversarial, got " + value);
    }
  } else if (key == "failures") {
    cfg.backend.inject_failures = parse_flag(key, value);
  } else if (key == "failure_radius") {
    cfg.backend.failure_radius = parse_double(key, value);
  } else if (key == "c_qme") {
    cfg.backend.c_qme = parse_double(key, value);
  } else if (key == "out_csv") {
    cfg.out_csv = value;
  } else if (key == "out_json") {
    cfg.out_json = value;
  } else {
    throw config_error("config: unknown [experiment] key '" + key + "'");
  }
}

void apply_fixture_key(ExperimentConfig& cfg, const std::string& key,
                       const std::string& value) {
  if (key == "kind") {
    cfg.fixture_kind = value;
  } else if (key == "d") {
    cfg.d = static_cast<int>(parse_int(key, value));
  } else if (key == "lipschitz") {
    cfg.fixture.lipschitz = parse_double(key, value);
  } else if (key == "radius") {
    cfg.fixture.radius = parse_double(key, value);
  } else {
    // Kind-specific; the fixture factory validates the final set.
    cfg.fixture.extra[key] = parse_double(key, value);
  }
}

void validate(const ExperimentConfig& cfg) {
  const auto& algs = known_algorithms();
  if (std::find(algs.begin(), algs.end(), cfg.algorithm) == algs.end())
    throw config_error("config: unknown algorithm '" + cfg.algorithm + "'");
  if (cfg.trials < 1) throw config_error("config: trials must be >= 1");
  if (cfg.d < 1) throw config_error("config: d must be >= 1");
  if (cfg.epsilons.empty()) throw config_error("config: empty epsilon grid");
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0.0))
      throw config_error("config: epsilon values must be positive");
    if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
      throw config_error("config: epsilon grid must be strictly decreasing");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.epsilons.clear();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw config_error("config line " + std::to_string(lineno) +
                           ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "experiment" && section != "fixture" && section != "grid")
        throw config_error("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error("config line " + std::to_string(lineno) +
                         ": empty key or value");
    if (section == "experiment") {
      apply_experiment_key(cfg, key, value);
    } else if (section == "fixture") {
      apply_fixture_key(cfg, key, value);
    } else if (section == "grid") {
      if (key == "epsilon") {
        cfg.epsilons = parse_grid(key, value);
      } else {
        throw config_error("config: unknown [grid] key '" + key + "'");
      }
    } else {
      throw config_error("config line " + std::to_string(lineno) +
                         ": key before any section header");
    }
  }
  if (cfg.epsilons.empty()) cfg.epsilons = {0.1};
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ExperimentConfig default_config(const std::string& algorithm) {
  ExperimentConfig cfg;
  cfg.algorithm = algorithm;
  cfg.trials = 10;
  cfg.seed = 1;
  if (algorithm == "qvr") {
    cfg.fixture_kind = "quadratic-noisy";
    cfg.d = 8;
    cfg.epsilons = {0.2, 0.1, 0.05, 0.025};
  } else if (algorithm == "acsa") {
    cfg.fixture_kind = "ball-distance";
    cfg.d = 2;
    cfg.epsilons = {0.2, 0.1, 0.05};
  } else if (algorithm == "qscp") {
    cfg.fixture_kind = "ball-distance";
    cfg.d = 2;
    cfg.fixture.extra["noise"] = 0.25;
    cfg.epsilons = {0.2, 0.1, 0.05};
  } else if (algorithm == "qsgd") {
    cfg.fixture_kind = "quadratic-noisy";
    cfg.d = 2;
    cfg.fixture.extra["shift"] = 1.0;
    cfg.epsilons = {0.3, 0.2, 0.1};
  } else if (algorithm == "qspider") {
    cfg.fixture_kind = "seeded-smooth-nonconvex";
    cfg.d = 2;
    cfg.trials = 5;
    cfg.epsilons = {0.6, 0.45, 0.3};
  } else if (algorithm == "sgd-baseline") {
    cfg.fixture_kind = "ball-distance";
    cfg.d = 2;
    cfg.epsilons = {0.2, 0.1, 0.05};
  } else {
    throw config_error("config: unknown algorithm '" + algorithm + "'");
  }
  validate(cfg);
  return cfg;
}

RunRecord run_single(const ExperimentConfig& cfg, int cell_index,
                     int trial_index) {
  const double eps = cfg.epsilons.at(static_cast<std::size_t>(cell_index));
  const std::uint64_t stream =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cell_index)) << 32) |
      static_cast<std::uint64_t>(static_cast<std::uint32_t>(trial_index));
  Rng rng(cfg.seed, stream);
  ProblemInstance problem = make_fixture(cfg.fixture_kind, cfg.d, cfg.fixture, rng);
  const MeanEstimationBackend backend(cfg.backend);
  QueryLedger ledger;

  RunRecord rec;
  rec.algorithm = cfg.algorithm;
  rec.fixture = cfg.fixture_kind;
  rec.d = cfg.d;
  rec.epsilon = eps;
  rec.seed = cfg.seed;
  rec.metric = std::numeric_limits<double>::quiet_NaN();

  const auto gap_metric = [&](const Vec& x) {
    if (problem.objective && problem.optimum_value)
      return problem.objective(x) - *problem.optimum_value;
    return std::numeric_limits<double>::quiet_NaN();
  };
  const auto grad_norm_metric = [&](const Vec& x) {
    if (problem.gradient) return problem.gradient(x).norm();
    return std::numeric_limits<double>::quiet_NaN();
  };

  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.algorithm == "qvr") {
    const Vec x0 = Vec::Zero(cfg.d);
    const auto src = gradient_source(problem.oracle, x0);
    const Vec est = mlmc_variance_reduce(backend, src, eps, rng, ledger);
    if (problem.oracle->traits().has_exact_mean)
      rec.metric = (est - problem.oracle->exact_mean(x0)).norm();
  } else if (cfg.algorithm == "acsa") {
    const auto res = run_acsa(problem, eps, backend, rng, ledger);
    rec.metric = gap_metric(res.x);
  } else if (cfg.algorithm == "qscp") {
    const auto res = run_qscp(problem, eps, backend, rng, ledger);
    rec.metric = gap_metric(res.x);
    rec.degraded = res.degraded;
  } else if (cfg.algorithm == "qsgd") {
    const auto res = run_qsgd(problem, eps, backend, rng, ledger);
    rec.metric = grad_norm_metric(res.x);
  } else if (cfg.algorithm == "qspider") {
    const auto res = run_qspider(problem, eps, backend, rng, ledger);
    rec.metric = grad_norm_metric(res.x);
  } else if (cfg.algorithm == "sgd-baseline") {
    const auto res = run_sgd_baseline(problem, eps, rng, ledger);
    rec.metric = gap_metric(res.x);
  } else {
    throw config_error("config: unknown algorithm '" + cfg.algorithm + "'");
  }
  const auto t1 = std::chrono::steady_clock::now();

  rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rec.queries = ledger.quantum_queries_charged();
  rec.classical_samples = ledger.classical_samples_drawn();
  rec.phases = ledger.by_phase();
  return rec;
}

SweepResult run_sweep(const ExperimentConfig& cfg, int jobs) {
  validate(cfg);
  const int cells = static_cast<int>(cfg.epsilons.size());
  const int total = cells * cfg.trials;
  SweepResult result;
  result.records.resize(static_cast<std::size_t>(total));

  if (jobs < 1) jobs = 1;
  jobs = std::min(jobs, total);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  const auto worker = [&](int w) {
    try {
      for (;;) {
        const int idx = next.fetch_add(1);
        if (idx >= total) return;
        const int cell = idx / cfg.trials;
        const int trial = idx % cfg.trials;
        result.records[static_cast<std::size_t>(idx)] =
            run_single(cfg, cell, trial);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
      next.store(total);
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  result.cells.resize(static_cast<std::size_t>(cells));
  for (int c = 0; c < cells; ++c) {
    CellSummary& cell = result.cells[static_cast<std::size_t>(c)];
    cell.epsilon = cfg.epsilons[static_cast<std::size_t>(c)];
    cell.trials = cfg.trials;
    for (int t = 0; t < cfg.trials; ++t) {
      const RunRecord& r =
          result.records[static_cast<std::size_t>(c * cfg.trials + t)];
      cell.mean_queries += static_cast<double>(r.queries);
      cell.mean_classical += static_cast<double>(r.classical_samples);
      cell.mean_metric += r.metric;
      cell.degraded += r.degraded ? 1 : 0;
    }
    cell.mean_queries /= cfg.trials;
    cell.mean_classical /= cfg.trials;
    cell.mean_metric /= cfg.trials;
  }
  result.fit = fit_query_exponent(result.cells);
  result.predicted = predicted_exponent(cfg.algorithm);
  return result;
}

std::optional<SlopeFit> fit_query_exponent(const std::vector<CellSummary>& cells) {
  const std::size_t n = cells.size();
  if (n < 2) return std::nullopt;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cells[i].epsilon > 0.0) || !(cells[i].mean_queries > 0.0))
      return std::nullopt;
    xs[i] = std::log(1.0 / cells[i].epsilon);
    ys[i] = std::log(cells[i].mean_queries);
  }
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  SlopeFit fit;
  fit.slope = sxy / sxx;
  if (n >= 3) {
    const double intercept = ybar - fit.slope * xbar;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - (intercept + fit.slope * xs[i]);
      rss += r * r;
    }
    fit.std_error =
        std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

std::optional<double> predicted_exponent(const std::string& algorithm) {
  if (algorithm == "qvr") return 1.0;
  if (algorithm == "acsa") return 1.5;
  if (algorithm == "qscp") return 1.0;
  if (algorithm == "qsgd") return 3.0;
  if (algorithm == "qspider") return 2.5;
  if (algorithm == "sgd-baseline") return 2.0;
  return std::nullopt;
}

std::string summary_json(const ExperimentConfig& cfg, const SweepResult& result) {
  nlohmann::json j;
  j["algorithm"] = cfg.algorithm;
  j["fixture"] = cfg.fixture_kind;
  j["d"] = cfg.d;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["backend"] = cfg.backend.mode == BackendMode::contract ? "contract" : "sample";
  j["c_qme"] = cfg.backend.c_qme;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : result.cells) {
    nlohmann::json jc;
    jc["epsilon"] = c.epsilon;
    jc["mean_queries"] = c.mean_queries;
    jc["mean_classical_samples"] = c.mean_classical;
    jc["mean_metric"] = c.mean_metric;
    jc["trials"] = c.trials;
    jc["degraded"] = c.degraded;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  if (result.fit) {
    nlohmann::json jf;
    jf["estimate"] = result.fit->slope;
    if (result.fit->std_error)
      jf["std_error"] = *result.fit->std_error;
    else
      jf["std_error"] = nullptr;
    j["slope"] = jf;
  } else {
    j["slope"] = nullptr;
  }
  if (result.predicted)
    j["predicted_exponent"] = *result.predicted;
  else
    j["predicted_exponent"] = nullptr;
  return j.dump(2) + "\n";
}

}  // namespace qso
