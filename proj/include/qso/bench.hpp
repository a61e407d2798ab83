#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qso/fixtures.hpp"
#include "qso/mean_estimation.hpp"
#include "qso/record.hpp"

namespace qso {

// One experiment: a single algorithm on a single fixture family, swept over a
// strictly decreasing epsilon grid with `trials` independent repetitions per
// grid point.
struct ExperimentConfig {
  std::string algorithm = "qvr";
  std::string fixture_kind = "quadratic-noisy";
  int d = 2;
  FixtureParams fixture;
  std::vector<double> epsilons{0.1};
  int trials = 1;
  std::uint64_t seed = 1;
  BackendConfig backend;
  std::string out_csv;   // empty: stdout
  std::string out_json;  // empty: stdout
};

// Flat key = value lines under [experiment], [fixture] and [grid] headers.
// Unknown experiment/grid keys and malformed values raise config_error;
// fixture keys beyond kind/d/lipschitz/radius pass through to the fixture
// factory, which rejects ones it does not recognize.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Ready-to-run defaults so every subcommand works without a config file.
ExperimentConfig default_config(const std::string& algorithm);

// One trial. The RNG stream is a pure function of (seed, cell, trial), so
// sweeps are reproducible for any --jobs value and any thread schedule.
RunRecord run_single(const ExperimentConfig& cfg, int cell_index,
                     int trial_index);

struct CellSummary {
  double epsilon = 0.0;
  double mean_queries = 0.0;
  double mean_classical = 0.0;
  double mean_metric = 0.0;
  int trials = 0;
  int degraded = 0;
};

struct SlopeFit {
  double slope = 0.0;
  std::optional<double> std_error;  // needs >= 3 grid points
};

struct SweepResult {
  std::vector<RunRecord> records;  // cell-major, trial-minor
  std::vector<CellSummary> cells;
  std::optional<SlopeFit> fit;  // needs >= 2 grid points
  std::optional<double> predicted;
};

SweepResult run_sweep(const ExperimentConfig& cfg, int jobs);

// OLS slope of ln(mean queries) against ln(1/epsilon).
std::optional<SlopeFit> fit_query_exponent(const std::vector<CellSummary>& cells);

// The theoretical query exponent for each algorithm's headline regime.
std::optional<double> predicted_exponent(const std::string& algorithm);

// Sorted keys, two-space indent; parse + re-emit is byte-stable.
std::string summary_json(const ExperimentConfig& cfg, const SweepResult& result);

}  // namespace qso
