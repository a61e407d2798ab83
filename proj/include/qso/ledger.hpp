#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "qso/common.hpp"

namespace qso {

// Accounting split: quantum_queries_charged is the modeled cost of the quantum
// estimator being simulated; classical_samples_drawn counts samples the
// simulation actually drew. Both are monotone; truth channels bypass the ledger.
class QueryLedger {
 public:
  struct PhaseCount {
    std::uint64_t quantum = 0;
    std::uint64_t classical = 0;
  };

  void add_quantum(std::uint64_t q) {
    quantum_ += q;
    phases_[phase_].quantum += q;
  }

  void add_classical(std::uint64_t n) {
    classical_ += n;
    phases_[phase_].classical += n;
  }

  std::uint64_t quantum_queries_charged() const { return quantum_; }
  std::uint64_t classical_samples_drawn() const { return classical_; }

  void set_phase(std::string name) { phase_ = std::move(name); }
  const std::string& phase() const { return phase_; }
  const std::map<std::string, PhaseCount>& by_phase() const { return phases_; }

  void merge(const QueryLedger& other) {
    quantum_ += other.quantum_;
    classical_ += other.classical_;
    for (const auto& [name, c] : other.phases_) {
      phases_[name].quantum += c.quantum;
      phases_[name].classical += c.classical;
    }
  }

 private:
  std::uint64_t quantum_ = 0;
  std::uint64_t classical_ = 0;
  std::string phase_ = "main";
  std::map<std::string, PhaseCount> phases_;
};

// RAII phase switch.
class PhaseScope {
 public:
  PhaseScope(QueryLedger& ledger, std::string phase)
      : ledger_(ledger), saved_(ledger.phase()) {
    ledger_.set_phase(std::move(phase));
  }
  ~PhaseScope() { ledger_.set_phase(saved_); }
  PhaseScope(const PhaseScope&) = delete;
  PhaseScope& operator=(const PhaseScope&) = delete;

 private:
  QueryLedger& ledger_;
  std::string saved_;
};

// Modeled query cost of one mean-estimation invocation at accuracy sigma_hat,
// failure budget delta, on a dim-dimensional source with deviation bound l_eff:
//   ceil(c_qme * (l_eff*sqrt(dim)/sigma_hat) * max(1, ln(1/delta))).
// Charges the ledger and returns the charge.
std::uint64_t charge_cost(QueryLedger& ledger, double l_eff, double sigma_hat,
                          double delta, int dim, double c_qme = 1.0);

}  // namespace qso
