#pragma once

#include "nucsched/constructive.hpp"

namespace nucsched {

struct ParetoPoint {
  int n_modifications = 0;
  double financial = 0.0;
  Solution solution;
};

struct ParetoConfig {
  double time_limit_per_point = 30.0;
  double gap_tol = 1e-9;   // points must be exact for the frontier to be meaningful
  int threads = 1;
};

// Sweeps the modification budget from 0 to n_max_end, minimizing financial
// cost under each budget, and returns the non-dominated (modification count,
// cost) points sorted by count. Budgets without a feasible solution are
// skipped; points dominated by a cheaper-or-equal smaller budget are pruned.
// Throws when not even the most permissive budget admits a feasible solution.
std::vector<ParetoPoint> pareto_frontier(const ProblemInstance& instance,
                                         const OutageSchedule& baseline, int n_max_end,
                                         const ParetoConfig& config = {});

// Two columns: n_modifications, financial_cost.
std::string frontier_csv(const std::vector<ParetoPoint>& frontier);

}  // namespace nucsched
