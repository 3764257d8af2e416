#pragma once

#include <map>
#include <string>
#include <vector>

#include "params.hpp"
#include "shooting.hpp"

namespace selfsim::acceptance {

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  ///< "<=", ">=", "==", "<", ">" or "is"
  double bound = 0.0;
  bool pass = false;
  bool gating = true;    ///< informational checks never fail a criterion
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  std::string error;  ///< set when the criterion threw

  bool pass() const;
};

constexpr int kCriteria = 13;

const char* title(int id);

/// Runs criteria on demand and caches the ground state of each parameter
/// point between them. `extended` adds the (3, 1.7) point to the PDE
/// criteria.
class Suite {
 public:
  explicit Suite(bool extended = false) : extended_(extended) {}
  CriterionResult run(int id);

 private:
  const GroundStateResult& ground_state(const Params& params);

  bool extended_;
  std::map<int, GroundStateResult> ground_states_;  // keyed by N
};

/// "PASS  4  ground-state bisection  (1.23 s)" followed by one indented line
/// per check.
std::string format(const CriterionResult& r, bool verbose = true);

}  // namespace selfsim::acceptance
