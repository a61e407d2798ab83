#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qso/common.hpp"

namespace qso {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool at_least = false;  // pass means measured >= bound instead of <=
  bool pass = false;
  double margin() const { return at_least ? measured - bound : bound - measured; }
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass() const;
};

const std::vector<std::string>& verify_suite_names();

// Statistical spot checks of the headline guarantees, also consumed by the
// acceptance binary. Suites: mlmc, lemma22, acsa-bound, qscp-success,
// spider-variance. Deterministic for a fixed seed.
VerifyReport run_verify_suite(const std::string& suite, std::uint64_t seed);

std::string format_report(const VerifyReport& report);

}  // namespace qso
