#include <cmath>

#include "doctest.h"
#include "qso/ledger.hpp"

using qso::charge_cost;
using qso::PhaseScope;
using qso::QueryLedger;

TEST_CASE("counters accumulate and never reset") {
  QueryLedger ledger;
  ledger.add_quantum(3);
  ledger.add_classical(5);
  ledger.add_quantum(2);
  CHECK(ledger.quantum_queries_charged() == 5);
  CHECK(ledger.classical_samples_drawn() == 5);
}

TEST_CASE("phase attribution via scopes") {
  QueryLedger ledger;
  ledger.add_quantum(1);
  {
    PhaseScope scp(ledger, "scp");
    ledger.add_quantum(10);
    {
      PhaseScope inner(ledger, "tournament");
      ledger.add_classical(4);
    }
    ledger.add_quantum(5);  // back in scp after the inner scope unwinds
  }
  ledger.add_classical(2);
  const auto& phases = ledger.by_phase();
  CHECK(phases.at("main").quantum == 1);
  CHECK(phases.at("main").classical == 2);
  CHECK(phases.at("scp").quantum == 15);
  CHECK(phases.at("tournament").classical == 4);
  CHECK(ledger.quantum_queries_charged() == 16);
}

TEST_CASE("merge sums totals and per-phase counts") {
  QueryLedger a;
  QueryLedger b;
  a.add_quantum(2);
  {
    PhaseScope p(b, "scp");
    b.add_quantum(7);
    b.add_classical(1);
  }
  a.merge(b);
  CHECK(a.quantum_queries_charged() == 9);
  CHECK(a.classical_samples_drawn() == 1);
  CHECK(a.by_phase().at("scp").quantum == 7);
  CHECK(a.by_phase().at("main").quantum == 2);
}

TEST_CASE("charge formula on hand-computed cases") {
  // ceil(c * (L sqrt(d) / sigma) * max(1, ln(1/delta)))
  QueryLedger ledger;
  CHECK(charge_cost(ledger, 1.0, 1.0, std::exp(-1.0), 1) == 1);
  CHECK(charge_cost(ledger, 2.0, 0.1, 0.5, 4) == 40);     // ln(2) < 1 floors to 1
  CHECK(charge_cost(ledger, 1.0, 0.01, 1e-6, 9) == 4145); // 300 * ln(1e6)
  CHECK(ledger.quantum_queries_charged() == 1 + 40 + 4145);
}

TEST_CASE("charge scales with the cost constant") {
  QueryLedger ledger;
  const auto base = charge_cost(ledger, 1.0, 0.05, 0.5, 4, 1.0);
  const auto doubled = charge_cost(ledger, 1.0, 0.05, 0.5, 4, 2.0);
  CHECK(doubled == 2 * base);
}

TEST_CASE("zero deviation bound charges nothing") {
  QueryLedger ledger;
  CHECK(charge_cost(ledger, 0.0, 0.3, 0.1, 4) == 0);
  CHECK(ledger.quantum_queries_charged() == 0);
}

TEST_CASE("charges land in the current phase") {
  QueryLedger ledger;
  {
    PhaseScope p(ledger, "estimate");
    charge_cost(ledger, 1.0, 0.5, 0.5, 1);
  }
  CHECK(ledger.by_phase().count("estimate") == 1);
  CHECK(ledger.by_phase().at("estimate").quantum ==
        ledger.quantum_queries_charged());
}
