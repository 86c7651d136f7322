#pragma once

#include <cstdint>

namespace qgps {

// Oracle-call accounting. One quantum call is one application of the lifted
// oracle, which happens once per state preparation and once per inverse
// preparation, so at all times
//   quantum_calls == state_preparations + 2 * q_applications.
struct OracleLedger {
  std::uint64_t classical_calls = 0;
  std::uint64_t quantum_calls = 0;
  std::uint64_t qsearch_rounds = 0;
  std::uint64_t q_applications = 0;
  std::uint64_t state_preparations = 0;

  OracleLedger& operator+=(const OracleLedger& other) {
    classical_calls += other.classical_calls;
    quantum_calls += other.quantum_calls;
    qsearch_rounds += other.qsearch_rounds;
    q_applications += other.q_applications;
    state_preparations += other.state_preparations;
    return *this;
  }

  friend OracleLedger operator-(OracleLedger a, const OracleLedger& b) {
    a.classical_calls -= b.classical_calls;
    a.quantum_calls -= b.quantum_calls;
    a.qsearch_rounds -= b.qsearch_rounds;
    a.q_applications -= b.q_applications;
    a.state_preparations -= b.state_preparations;
    return a;
  }

  std::uint64_t total_calls() const { return classical_calls + quantum_calls; }

  bool consistent() const { return quantum_calls == state_preparations + 2 * q_applications; }

  friend bool operator==(const OracleLedger&, const OracleLedger&) = default;
};

}  // namespace qgps
