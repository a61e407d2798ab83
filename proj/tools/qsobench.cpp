#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qso/bench.hpp"
#include "qso/verify.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out;
  std::string backend;
  std::optional<double> cqme;
};

void add_common(CLI::App* sub, CommonOpts& opt) {
  sub->add_option("--config", opt.config_path, "experiment config file");
  sub->add_option("--seed", opt.seed, "root RNG seed (overrides config)");
  sub->add_option("--jobs", opt.jobs, "worker threads for the trial grid")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", opt.out,
                  "CSV output path; the JSON summary lands next to it");
  sub->add_option("--backend", opt.backend, "mean-estimation backend")
      ->check(CLI::IsMember({"contract", "sample"}));
  sub->add_option("--cqme", opt.cqme, "query-cost constant c_qme");
}

std::string json_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".json";
  return csv_path + ".json";
}

void write_or_print(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::fputs(payload.c_str(), stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw qso::config_error("cannot open output file " + path);
  f << payload;
}

int run_experiment(const std::string& forced_algorithm, const CommonOpts& opt) {
  qso::ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = qso::load_config_file(opt.config_path);
    if (!forced_algorithm.empty()) cfg.algorithm = forced_algorithm;
  } else if (!forced_algorithm.empty()) {
    cfg = qso::default_config(forced_algorithm);
  } else {
    throw qso::config_error("sweep needs --config");
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.cqme) cfg.backend.c_qme = *opt.cqme;
  if (opt.backend == "contract") cfg.backend.mode = qso::BackendMode::contract;
  if (opt.backend == "sample") cfg.backend.mode = qso::BackendMode::sample_based;
  if (!opt.out.empty()) {
    cfg.out_csv = opt.out;
    cfg.out_json = json_path_for(opt.out);
  }

  const qso::SweepResult result = qso::run_sweep(cfg, opt.jobs);
  write_or_print(cfg.out_csv, qso::csv_document(result.records));
  write_or_print(cfg.out_json, qso::summary_json(cfg, result));

  std::string note = cfg.algorithm + ": " +
                     std::to_string(result.records.size()) + " runs over " +
                     std::to_string(cfg.epsilons.size()) + " grid points";
  if (result.fit) {
    note += ", slope " + qso::format_double(result.fit->slope);
    if (result.fit->std_error)
      note += " +/- " + qso::format_double(*result.fit->std_error);
    if (result.predicted)
      note += " (predicted " + qso::format_double(*result.predicted) + ")";
  }
  std::fprintf(stderr, "%s\n", note.c_str());
  return 0;
}

int run_verify(const std::vector<std::string>& suites,
               std::optional<std::uint64_t> seed) {
  const auto& all = qso::verify_suite_names();
  const auto& chosen = suites.empty() ? all : suites;
  bool ok = true;
  for (const auto& name : chosen) {
    const auto report = qso::run_verify_suite(name, seed.value_or(1));
    std::fputs(qso::format_report(report).c_str(), stdout);
    ok = ok && report.pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query-ledger benchmarks for simulated quantum-accelerated "
               "stochastic optimization"};
  app.require_subcommand(1);

  CommonOpts opt;
  const std::vector<std::pair<std::string, std::string>> algorithms = {
      {"qvr", "variance-reduced mean estimation on a fixed gradient"},
      {"acsa", "smoothed accelerated method for convex nonsmooth problems"},
      {"qscp", "cutting-plane candidates plus tournament selection"},
      {"qsgd", "variance-reduced SGD with random stopping"},
      {"qspider", "normalized SPIDER walk on shared-seed oracles"},
  };
  std::vector<CLI::App*> alg_subs;
  for (const auto& [name, desc] : algorithms) {
    CLI::App* sub = app.add_subcommand(name, desc);
    add_common(sub, opt);
    alg_subs.push_back(sub);
  }
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run the experiment exactly as a config file describes it");
  add_common(sweep, opt);

  CLI::App* verify = app.add_subcommand(
      "verify", "statistical verification suites (all when none are named)");
  std::vector<std::string> suites;
  verify->add_option("suites", suites, "suite names")
      ->check(CLI::IsMember(qso::verify_suite_names()));
  std::optional<std::uint64_t> verify_seed;
  verify->add_option("--seed", verify_seed, "root RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < alg_subs.size(); ++i)
      if (alg_subs[i]->parsed())
        return run_experiment(algorithms[i].first, opt);
    if (sweep->parsed()) return run_experiment("", opt);
    if (verify->parsed()) return run_verify(suites, verify_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
