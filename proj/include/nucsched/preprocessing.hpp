#pragma once

#include "nucsched/formulation.hpp"

namespace nucsched {

struct WindowChange {
  int unit = 0;            // index into t2_units
  int cycle = 0;           // k >= 1
  int old_earliest = 0, old_latest = 0;
  int new_earliest = 0, new_latest = 0;
  bool made_optional = false;   // window pushed entirely beyond the horizon
};

struct ReductionReport {
  std::vector<WindowChange> changes;
  long binaries_before = 0;
  long binaries_after = 0;
  bool heuristic = false;       // reductions below may cut feasible solutions
  bool infeasible = false;      // a mandatory outage was proven window-empty
  std::string infeasible_where;

  std::string to_csv() const;
};

// Raises each outage's earliest start by fuel-depletion inference: the outage
// cannot begin before the reactor has had time to burn from its minimal
// possible start-of-cycle fuel down to the anticipation threshold at maximal
// output. Never cuts a feasible solution. Outages whose window is pushed
// beyond the horizon become optional; a mandatory outage with an emptied
// window flags the instance infeasible (instance left unchanged there).
std::pair<ProblemInstance, ReductionReport> tighten_exact(const ProblemInstance& instance);

// Caps the latest start of outage k+1 at (latest start of k) + duration_k +
// max_weeks. May cut feasible solutions; flagged heuristic.
std::pair<ProblemInstance, ReductionReport> tighten_max_cycle_length(
    const ProblemInstance& instance, int max_weeks);

// Shrinks windows to the span where the relaxation's step values are
// fractional (integral steps pin the begin week). May cut feasible solutions;
// flagged heuristic.
std::pair<ProblemInstance, ReductionReport> fix_from_lp(const ProblemInstance& instance,
                                                        const VarMap& varmap,
                                                        const std::vector<double>& lp_values);

}  // namespace nucsched
