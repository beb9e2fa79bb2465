#pragma once

#include "nucsched/localsearch.hpp"

namespace nucsched {

struct OracleLimits {
  long max_schedules = 200000;
  double lp_time_limit = 10.0;
};

struct OracleResult {
  bool found = false;
  Solution best;
  long n_candidates = 0;   // CT13-consistent schedules within windows
  long n_feasible = 0;     // survivors of resource filter + dispatch LP
  std::vector<double> all_costs;   // filled when collect_costs is set
};

// Exhaustive ground truth: every in-window schedule, combinatorial resource
// filter, dispatch LP on survivors. Ties go to the lexicographically smallest
// schedule.
OracleResult enumerate_optimal(const ProblemInstance& instance, const OracleLimits& limits = {},
                               bool collect_costs = false);

// As enumerate_optimal over the schedules a neighborhood admits around the
// incumbent. Implemented independently of the MILP restriction.
OracleResult restricted_optimal(const ProblemInstance& instance, const Solution& incumbent,
                                const NeighborhoodSpec& spec, const OracleLimits& limits = {});

// All dispatch-feasible schedules, in deterministic order.
std::vector<OutageSchedule> enumerate_feasible_schedules(const ProblemInstance& instance,
                                                         const OracleLimits& limits = {});

// Non-dominated (modification count, financial cost) points against a baseline.
std::vector<std::pair<int, double>> oracle_frontier(const ProblemInstance& instance,
                                                    const OutageSchedule& baseline,
                                                    const OracleLimits& limits = {});

}  // namespace nucsched
