#pragma once

#include "nucsched/formulation.hpp"

namespace nucsched {

struct RepairConfig {
  StabilityShape shape = StabilityShape::count;
  int radius = 5;           // initial window half-width around the baseline; doubles on failure
  double epsilon = -1.0;    // weight of the financial tie-break; <= 0 picks one from the scale
  double time_limit = 30.0; // per attempt
};

struct ConstructiveConfig {
  double time_limit = 60.0;
  double gap_tol = 1e-4;
  int threads = 1;
};

struct RepairOutcome {
  bool feasible = false;
  Solution solution;
  std::string certificate;   // why full-window repair failed
};

// Finds a feasible solution minimally modified from the baseline schedule:
// minimizes the modification penalty with an epsilon financial tie-break over
// windows of growing radius around the baseline weeks. The baseline may
// violate windows or resource limits; it must only be cycle-consistent
// (no outage scheduled after a skipped one).
RepairOutcome repair(const OutageSchedule& baseline, const ProblemInstance& instance,
                     const RepairConfig& config = {});

// Aggressive approximation first, then an exact re-dispatch of its schedule;
// falls back to repair when the pinned dispatch is infeasible.
Solution solve_simplified(const ProblemInstance& instance, const ConstructiveConfig& config = {});

// Stage-by-stage construction: fixes each cycle's weeks in order, keeping one
// lookahead cycle free, then re-optimizes the last cycle on the full model.
// Throws naming the stage when a stage model is infeasible.
Solution solve_rrf(const ProblemInstance& instance, const ConstructiveConfig& config = {});

// Decomposition by unit: each reactor is scheduled against its proportional
// demand share, the per-unit plans are merged and re-dispatched, and conflicts
// are repaired.
Solution solve_cmsa(const ProblemInstance& instance, const ConstructiveConfig& config = {},
                    const RepairConfig& repair_config = {});

}  // namespace nucsched
