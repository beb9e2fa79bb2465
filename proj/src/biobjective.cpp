#include "nucsched/biobjective.hpp"

#include <algorithm>

#include "nucsched/strfmt.hpp"

namespace nucsched {

std::vector<ParetoPoint> pareto_frontier(const ProblemInstance& instance,
                                         const OutageSchedule& baseline, int n_max_end,
                                         const ParetoConfig& config) {
  if (n_max_end < 0) throw DomainError("pareto_frontier: n_max_end must be >= 0");

  ProblemInstance inst = instance;
  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i)
    for (int k = 1; k <= inst.num_cycles(i); ++k)
      inst.cycle(i, k).baseline_week = baseline.scheduled(i, k)
                                           ? std::optional<int>(baseline.begin(i, k))
                                           : std::nullopt;

  std::vector<ParetoPoint> points;
  std::optional<Solution> previous;   // the budget-t optimum stays feasible at t+1

  for (int n_max = 0; n_max <= n_max_end; ++n_max) {
    auto [model, vm] = build_compact(inst);
    StabilityOptions st;
    st.mode = StabilityMode::budget;
    st.shape = StabilityShape::count;
    st.n_max = n_max;
    add_stability(model, vm, inst, st);

    milp::SolveConfig cfg;
    cfg.time_limit = config.time_limit_per_point;
    cfg.rel_gap_tol = config.gap_tol;
    cfg.threads = config.threads;
    if (previous) {
      std::vector<double> ws = warmstart_assignment(model, vm, *previous, inst);
      if (milp::assignment_feasible(model, ws)) cfg.warmstart = ws;
    }
    milp::SolveOutcome out = milp::solve(model, cfg);
    if (!out.has_solution()) continue;

    VarMap vm_plain = vm;
    vm_plain.stability.mode = StabilityMode::off;
    Solution sol = extract_solution(out, vm_plain, instance);
    if (!sol.feasible()) continue;
    previous = sol;

    int made = static_cast<int>(
        stability_cost_against(sol.schedule, baseline, instance, StabilityShape::count) + 0.5);
    double cost = sol.cost.financial();
    // keep only strict improvements over the frontier built so far
    if (!points.empty() && cost >= points.back().financial - 1e-9) continue;
    points.push_back({made, cost, std::move(sol)});
  }

  if (points.empty())
    throw DomainError(
        fmt("pareto_frontier: no feasible solution up to a budget of {}", n_max_end));
  return points;
}

std::string frontier_csv(const std::vector<ParetoPoint>& frontier) {
  std::string out = "n_modifications,financial_cost\n";
  for (const auto& p : frontier) out += fmt("{},{}\n", p.n_modifications, p.financial);
  return out;
}

}  // namespace nucsched
