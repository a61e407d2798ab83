#include <cmath>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qso/bench.hpp"

using namespace qso;

TEST_CASE("config round trip") {
  const std::string text = R"(
# comment
[experiment]
algorithm = qsgd
seed = 42
trials = 3
backend = sample
noise = adversarial
failures = on
c_qme = 2.5
out_csv = runs.csv

[fixture]
kind = quadratic-noisy
d = 5
lipschitz = 2
radius = 1.5
shift = 1

[grid]
epsilon = 0.4, 0.2, 0.1
)";
  const auto cfg = parse_config(text);
  CHECK(cfg.algorithm == "qsgd");
  CHECK(cfg.seed == 42);
  CHECK(cfg.trials == 3);
  CHECK(cfg.backend.mode == BackendMode::sample_based);
  CHECK(cfg.backend.noise == NoisePolicy::adversarial_boundary);
  CHECK(cfg.backend.inject_failures);
  CHECK(cfg.backend.c_qme == 2.5);
  CHECK(cfg.out_csv == "runs.csv");
  CHECK(cfg.fixture_kind == "quadratic-noisy");
  CHECK(cfg.d == 5);
  CHECK(cfg.fixture.lipschitz == 2.0);
  CHECK(cfg.fixture.radius == 1.5);
  CHECK(cfg.fixture.extra.at("shift") == 1.0);
  REQUIRE(cfg.epsilons.size() == 3);
  CHECK(cfg.epsilons[0] == 0.4);
  CHECK(cfg.epsilons[2] == 0.1);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS((void)parse_config("[experiment]\nwobble = 1\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[grid]\nwobble = 1\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[grid]\nepsilon = 0.1 0.1\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[grid]\nepsilon = 0.1 0.2\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[grid]\nepsilon = 0.1 -0.2\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[experiment]\ntrials = 0\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[experiment]\nbackend = maybe\n"),
                  config_error);
  CHECK_THROWS_AS((void)parse_config("[experiment]\nalgorithm = magic\n"),
                  config_error);
  CHECK_THROWS_AS((void)parse_config("[experiment]\ntrials = three\n"),
                  config_error);
  CHECK_THROWS_AS((void)parse_config("algorithm = qvr\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[mystery]\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("[experiment]\nalgorithm\n"), config_error);
}

TEST_CASE("empty grid falls back to a single default cell") {
  const auto cfg = parse_config("[experiment]\nalgorithm = qvr\n");
  REQUIRE(cfg.epsilons.size() == 1);
  CHECK(cfg.epsilons[0] == 0.1);
}

TEST_CASE("defaults exist for every algorithm") {
  for (const char* alg :
       {"qvr", "acsa", "qscp", "qsgd", "qspider", "sgd-baseline"}) {
    const auto cfg = default_config(alg);
    CHECK(cfg.algorithm == alg);
    CHECK(cfg.trials >= 1);
    CHECK(cfg.epsilons.size() >= 2);
  }
  CHECK_THROWS_AS((void)default_config("magic"), config_error);
}

TEST_CASE("missing config file") {
  CHECK_THROWS_AS((void)load_config_file("/nonexistent/qso.cfg"), config_error);
}

TEST_CASE("single run fills the record") {
  auto cfg = default_config("qvr");
  cfg.d = 2;
  cfg.seed = 9;
  const auto rec = run_single(cfg, 1, 0);
  CHECK(rec.algorithm == "qvr");
  CHECK(rec.fixture == "quadratic-noisy");
  CHECK(rec.d == 2);
  CHECK(rec.epsilon == cfg.epsilons[1]);
  CHECK(rec.seed == 9);
  CHECK(rec.queries > 0);
  CHECK(std::isfinite(rec.metric));
  CHECK(rec.wall_ms >= 0.0);
  CHECK(!rec.phases.empty());
}

TEST_CASE("csv schema") {
  CHECK(std::string(kCsvHeader) ==
        "algorithm,fixture,d,epsilon,seed,queries,classical_samples,metric,"
        "wall_ms,degraded");
  RunRecord r;
  r.algorithm = "qvr";
  r.fixture = "linear";
  r.d = 3;
  r.epsilon = 0.5;
  r.seed = 7;
  r.queries = 10;
  r.classical_samples = 20;
  r.metric = 0.25;
  r.wall_ms = 1.5;
  r.degraded = true;
  CHECK(csv_row(r) == "qvr,linear,3,0.5,7,10,20,0.25,1.500,1");
  const auto doc = csv_document({r});
  CHECK(doc == std::string(kCsvHeader) + "\n" + csv_row(r) + "\n");
}

TEST_CASE("doubles format to the shortest round-trip form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::nan("")) == "nan");
  for (double v : {1.0 / 3.0, 6.25e-7, 1e300, -0.0625}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("sweeps are schedule independent") {
  auto cfg = default_config("qvr");
  cfg.d = 2;
  cfg.trials = 3;
  cfg.epsilons = {0.2, 0.1};
  const auto a = run_sweep(cfg, 1);
  const auto b = run_sweep(cfg, 4);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].epsilon == b.records[i].epsilon);
    CHECK(a.records[i].queries == b.records[i].queries);
    CHECK(a.records[i].classical_samples == b.records[i].classical_samples);
    CHECK(a.records[i].metric == b.records[i].metric);
    CHECK(a.records[i].degraded == b.records[i].degraded);
  }
  CHECK(summary_json(cfg, a) == summary_json(cfg, b));
}

TEST_CASE("summary json is parse stable") {
  auto cfg = default_config("qvr");
  cfg.d = 2;
  cfg.trials = 2;
  cfg.epsilons = {0.2, 0.1, 0.05};
  const auto res = run_sweep(cfg, 2);
  const std::string text = summary_json(cfg, res);
  const auto parsed = nlohmann::json::parse(text);
  CHECK(parsed.dump(2) + "\n" == text);
  CHECK(parsed.at("algorithm") == "qvr");
  CHECK(parsed.at("cells").size() == 3);
  CHECK(parsed.at("predicted_exponent") == 1.0);
  REQUIRE(parsed.at("slope").is_object());
  CHECK(parsed.at("slope").at("std_error").is_number());
}

TEST_CASE("slope fit recovers an exact power law") {
  std::vector<CellSummary> cells(3);
  const double eps[] = {0.4, 0.2, 0.1};
  for (int i = 0; i < 3; ++i) {
    cells[static_cast<std::size_t>(i)].epsilon = eps[i];
    cells[static_cast<std::size_t>(i)].mean_queries =
        100.0 / (eps[i] * eps[i]);
  }
  const auto fit = fit_query_exponent(cells);
  REQUIRE(fit.has_value());
  CHECK(fit->slope == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(fit->std_error.has_value());
  CHECK(*fit->std_error == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_FALSE(fit_query_exponent({cells[0]}).has_value());
  cells[1].mean_queries = 0.0;
  CHECK_FALSE(fit_query_exponent(cells).has_value());
}

TEST_CASE("predicted exponents") {
  CHECK(predicted_exponent("qvr") == 1.0);
  CHECK(predicted_exponent("acsa") == 1.5);
  CHECK(predicted_exponent("qscp") == 1.0);
  CHECK(predicted_exponent("qsgd") == 3.0);
  CHECK(predicted_exponent("qspider") == 2.5);
  CHECK(predicted_exponent("sgd-baseline") == 2.0);
  CHECK_FALSE(predicted_exponent("magic").has_value());
}
