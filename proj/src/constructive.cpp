#include "nucsched/constructive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nucsched/strfmt.hpp"

namespace nucsched {

namespace {

// Upper bound on |financial cost|, used to size the epsilon tie-break so the
// whole financial range maps strictly below one modification unit.
double cost_scale(const ProblemInstance& inst) {
  double scale = 0.0;
  for (const auto& u : inst.t2_units) {
    double stock = u.initial_fuel;
    for (const auto& c : u.cycles) {
      scale += c.refuel_cost * c.refuel_max;
      stock = std::max(stock, c.stock_max);
    }
    scale += u.final_fuel_credit * stock;
  }
  for (int w = 0; w < inst.weeks; ++w) {
    double top = 0.0;
    for (const auto& u : inst.t1_units) top = std::max(top, u.cost[w]);
    scale += top * inst.fuel_factor[w] * inst.demand[w];
  }
  return std::max(1.0, scale);
}

Solution dispatch_schedule(const ProblemInstance& inst, const OutageSchedule& schedule,
                           double time_limit) {
  auto [lp, vm] = build_dispatch_lp(inst, schedule);
  milp::SolveConfig cfg;
  cfg.time_limit = time_limit;
  milp::SolveOutcome out = milp::solve(lp, cfg);
  if (!out.has_solution())
    throw DomainError("dispatch: no production plan for the given schedule");
  return extract_solution(out, vm, inst);
}

}  // namespace

RepairOutcome repair(const OutageSchedule& baseline, const ProblemInstance& instance,
                     const RepairConfig& config) {
  double eps = config.epsilon > 0.0 ? config.epsilon : 0.5 / cost_scale(instance);
  int radius = std::max(1, config.radius);

  while (true) {
    bool full = radius >= instance.weeks;
    ProblemInstance inst = instance;
    for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i)
      for (int k = 1; k <= inst.num_cycles(i); ++k) {
        auto& c = inst.cycle(i, k);
        c.baseline_week = baseline.scheduled(i, k) ? std::optional<int>(baseline.begin(i, k))
                                                   : std::nullopt;
        if (!baseline.scheduled(i, k) || full) continue;
        int w1 = baseline.begin(i, k);
        // shrink the window towards the baseline but never empty it
        int ta = instance.latest_start(i, k);
        c.earliest = std::max(c.earliest, std::min(w1 - radius, ta));
        if (instance.outage_mandatory(i, k))
          c.latest = std::min(c.latest, std::max(w1 + radius, c.earliest));
      }

    auto [model, vm] = build_compact(inst);
    for (auto& coef : model.objective) coef *= eps;
    model.objective_offset *= eps;
    StabilityOptions st;
    st.mode = StabilityMode::objective;
    st.shape = config.shape;
    add_stability(model, vm, inst, st);

    milp::SolveConfig cfg;
    cfg.time_limit = config.time_limit;
    cfg.rel_gap_tol = 1e-9;   // the tie-break lives far below the default gap
    milp::SolveOutcome out = milp::solve(model, cfg);
    if (out.has_solution()) {
      VarMap vm_plain = vm;
      vm_plain.stability.mode = StabilityMode::off;
      Solution sol = extract_solution(out, vm_plain, instance);
      sol.cost.stability =
          stability_cost_against(sol.schedule, baseline, instance, config.shape);
      if (sol.feasible()) return {true, std::move(sol), ""};
      if (full)
        return {false, std::move(sol),
                "full-window repair produced a model solution failing validation"};
    } else if (full) {
      return {false, {},
              out.status == milp::SolveStatus::infeasible
                  ? "no feasible solution exists in the full windows"
                  : "full-window repair hit its limits without a solution"};
    }
    radius *= 2;
  }
}

Solution solve_simplified(const ProblemInstance& instance, const ConstructiveConfig& config) {
  auto [model, vm] = build_simplified(instance);
  milp::SolveConfig cfg;
  cfg.time_limit = config.time_limit / 2.0;
  cfg.rel_gap_tol = config.gap_tol;
  cfg.threads = config.threads;
  milp::SolveOutcome out = milp::solve(model, cfg);
  if (!out.has_solution()) throw DomainError("simplified model: no solution found");
  Solution approx = extract_solution(out, vm, instance);

  try {
    Solution sol = dispatch_schedule(instance, approx.schedule, config.time_limit / 2.0);
    if (sol.feasible()) return sol;
  } catch (const DomainError&) {
    // fall through to repair
  }
  RepairOutcome fixed = repair(approx.schedule, instance);
  if (!fixed.feasible) throw DomainError("repair after simplified solve: " + fixed.certificate);
  return fixed.solution;
}

Solution solve_rrf(const ProblemInstance& instance, const ConstructiveConfig& config) {
  int n2 = static_cast<int>(instance.t2_units.size());
  int K = 0;
  for (int i = 0; i < n2; ++i) K = std::max(K, instance.num_cycles(i));
  if (K == 0) return dispatch_schedule(instance, OutageSchedule::empty(instance), config.time_limit);

  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  double per_stage = config.time_limit / (K + 1);
  std::vector<std::vector<std::optional<int>>> fixed(n2);
  for (int i = 0; i < n2; ++i) fixed[i].assign(instance.num_cycles(i), std::nullopt);

  for (int k0 = 1; k0 < K; ++k0) {
    auto [model, vm, stage] = build_rrf_stage(instance, k0, fixed);
    milp::SolveConfig cfg;
    // unspent budget from earlier stages rolls forward
    cfg.time_limit = std::max(1.0, per_stage * (k0 + 1) - elapsed());
    cfg.rel_gap_tol = config.gap_tol;
    cfg.threads = config.threads;
    milp::SolveOutcome out = milp::solve(model, cfg);
    if (!out.has_solution())
      throw DomainError(fmt("stage {} of {} is infeasible or timed out", k0, K - 1));
    Solution sol = extract_solution(out, vm, stage);
    for (int i = 0; i < n2; ++i)
      if (k0 <= instance.num_cycles(i)) fixed[i][k0 - 1] = sol.schedule.week_of[i][k0 - 1];
  }

  // final pass: all cycles but each unit's last pinned, full horizon model
  ProblemInstance final_inst = instance;
  for (int i = 0; i < n2; ++i)
    for (int k = 1; k < instance.num_cycles(i); ++k) {
      auto& c = final_inst.cycle(i, k);
      if (fixed[i][k - 1]) {
        c.earliest = c.latest = *fixed[i][k - 1];
      } else {
        c.earliest = c.latest = final_inst.weeks + 1;   // stays skipped
      }
    }
  auto [model, vm] = build_compact(final_inst);
  milp::SolveConfig cfg;
  cfg.time_limit = std::max(1.0, config.time_limit - elapsed());
  cfg.rel_gap_tol = config.gap_tol;
  cfg.threads = config.threads;
  milp::SolveOutcome out = milp::solve(model, cfg);
  if (!out.has_solution()) throw DomainError(fmt("final stage of {} is infeasible", K));
  Solution sol = extract_solution(out, vm, final_inst);
  sol.violations = validate(sol, instance);
  return sol;
}

Solution solve_cmsa(const ProblemInstance& instance, const ConstructiveConfig& config,
                    const RepairConfig& repair_config) {
  int n2 = static_cast<int>(instance.t2_units.size());
  if (n2 == 0) return dispatch_schedule(instance, OutageSchedule::empty(instance), config.time_limit);

  // share of total nuclear capacity per unit and week
  std::vector<double> total(instance.weeks, 0.0);
  for (const auto& u : instance.t2_units)
    for (int w = 0; w < instance.weeks; ++w) total[w] += u.p_max[w];

  OutageSchedule merged = OutageSchedule::empty(instance);
  double per_unit = config.time_limit / (n2 + 1);
  for (int i = 0; i < n2; ++i) {
    ProblemInstance sub = instance;
    sub.t2_units = {instance.t2_units[i]};
    for (int w = 0; w < instance.weeks; ++w) {
      double share = total[w] > 0.0 ? instance.t2_units[i].p_max[w] / total[w] : 0.0;
      sub.demand[w] = share * instance.demand[w];
      for (auto& t1 : sub.t1_units) {
        t1.p_min[w] *= share;
        t1.p_max[w] *= share;
      }
    }
    sub.scheduling_constraints.clear();
    for (const auto& rc : instance.scheduling_constraints) {
      ResourceConstraint own = rc;
      own.members.clear();
      own.cumulative.clear();
      for (size_t a = 0; a < rc.members.size(); ++a)
        if (rc.members[a].unit == i) {
          own.members.push_back({0, rc.members[a].cycle});
          own.cumulative.push_back(rc.cumulative[a]);
        }
      if (!own.members.empty()) sub.scheduling_constraints.push_back(std::move(own));
    }

    auto [model, vm] = build_compact(sub);
    milp::SolveConfig cfg;
    cfg.time_limit = per_unit;
    cfg.rel_gap_tol = config.gap_tol;
    cfg.threads = config.threads;
    milp::SolveOutcome out = milp::solve(model, cfg);
    if (!out.has_solution())
      throw DomainError(fmt("unit {} subproblem is infeasible", instance.t2_units[i].id));
    Solution sol = extract_solution(out, vm, sub);
    merged.week_of[i] = sol.schedule.week_of[0];
  }

  try {
    Solution sol = dispatch_schedule(instance, merged, per_unit);
    if (sol.feasible()) return sol;
  } catch (const DomainError&) {
    // fall through to repair
  }
  RepairOutcome fixed = repair(merged, instance, repair_config);
  if (!fixed.feasible) throw DomainError("repair after merge: " + fixed.certificate);
  return fixed.solution;
}

}  // namespace nucsched
