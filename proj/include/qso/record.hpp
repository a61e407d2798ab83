#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qso/ledger.hpp"

namespace qso {

struct RunRecord {
  std::string algorithm;
  std::string fixture;
  int d = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t queries = 0;            // modeled quantum queries
  std::uint64_t classical_samples = 0;  // samples actually drawn
  double metric = 0.0;                  // objective gap or gradient norm
  double wall_ms = 0.0;
  bool degraded = false;
  std::map<std::string, QueryLedger::PhaseCount> phases;  // not in the CSV
};

// Stable schema; order is load-bearing for downstream parsers.
inline constexpr const char* kCsvHeader =
    "algorithm,fixture,d,epsilon,seed,queries,classical_samples,metric,wall_ms,"
    "degraded";

// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double v);

std::string csv_row(const RunRecord& r);
std::string csv_document(const std::vector<RunRecord>& records);

}  // namespace qso
