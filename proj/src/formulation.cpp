#include "nucsched/formulation.hpp"

#include <algorithm>
#include <cmath>

#include "nucsched/strfmt.hpp"

namespace nucsched {

using milp::Model;
using milp::Sense;

DVar VarMap::d(int i, int k, int w) const {
  if (k <= 0) return {-1, 1.0};
  if (k > static_cast<int>(first_free[i].size())) return {-1, 0.0};
  if (w < 1) return {-1, 0.0};
  if (w > weeks) w = weeks;
  if (mandatory[i][k - 1] && w >= latest[i][k - 1]) return {-1, 1.0};
  int lo = first_free[i][k - 1];
  if (lo < 0 || w < lo) return {-1, 0.0};
  int hi = lo + static_cast<int>(d_idx[i][k - 1].size()) - 1;
  if (w > hi) return {-1, 0.0};   // only reachable for optional outages
  return {d_idx[i][k - 1][w - lo], 0.0};
}

namespace {

struct Expr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  void add(int idx, double c) {
    if (idx >= 0 && c != 0.0) terms.emplace_back(idx, c);
  }
  void add(const DVar& v, double c) {
    if (v.is_var())
      add(v.idx, c);
    else
      constant += c * v.value;
  }
};

void add_row(Model& m, const std::string& name, Expr e, Sense sense, double rhs) {
  rhs -= e.constant;
  if (e.terms.empty()) {
    bool ok = (sense == Sense::le && 0.0 <= rhs + 1e-9) ||
              (sense == Sense::ge && 0.0 >= rhs - 1e-9) ||
              (sense == Sense::eq && std::abs(rhs) <= 1e-9);
    if (ok) return;   // trivially satisfied constant row
  }
  m.add_constraint(name, std::move(e.terms), sense, rhs);
}

void obj_add(Model& m, int idx, double c) {
  if (static_cast<size_t>(idx) >= m.objective.size()) m.objective.resize(idx + 1, 0.0);
  m.objective[idx] += c;
}

struct BuildFlags {
  DemandSense demand_sense = DemandSense::equality;
  bool production_equality = false;
  bool slack = false;
  double slack_cost = 0.0;
  bool credit = true;
  int anticipation_limit = INT_MAX;   // outages k <= limit get the threshold row
};

std::pair<Model, VarMap> build_core(const ProblemInstance& inst, const BuildFlags& flags) {
  inst.check_valid();
  Model m;
  VarMap vm;
  const int W = inst.weeks;
  const int n2 = static_cast<int>(inst.t2_units.size());
  const int n1 = static_cast<int>(inst.t1_units.size());
  vm.weeks = W;
  vm.first_free.resize(n2);
  vm.last_free.resize(n2);
  vm.mandatory.resize(n2);
  vm.latest.resize(n2);
  vm.d_idx.resize(n2);
  vm.r.resize(n2);
  vm.x_start.resize(n2);
  vm.x_end.resize(n2);
  vm.x_horizon.resize(n2);
  vm.p2.resize(n2);
  vm.p1.resize(n1);
  if (flags.slack) vm.slack.resize(n2);
  vm.s_bar.resize(n2);
  vm.slack_cost = flags.slack_cost;
  vm.credit_in_objective = flags.credit;

  for (int i = 0; i < n2; ++i) {
    const auto& u = inst.t2_units[i];
    int K = inst.num_cycles(i);
    vm.first_free[i].assign(K, -1);
    vm.last_free[i].assign(K, -1);
    vm.mandatory[i].assign(K, false);
    vm.latest[i].assign(K, 0);
    vm.d_idx[i].resize(K);
    vm.s_bar[i] = u.initial_fuel;
    for (int k = 1; k <= K; ++k) {
      const auto& c = u.cycles[k - 1];
      vm.s_bar[i] = std::max(vm.s_bar[i], c.stock_max);
      bool mand = c.latest <= W;
      vm.mandatory[i][k - 1] = mand;
      vm.latest[i][k - 1] = c.latest;
      int lo = std::max(1, c.earliest);
      int hi = mand ? c.latest - 1 : W;
      if (lo <= hi) {
        vm.first_free[i][k - 1] = lo;
        vm.last_free[i][k - 1] = hi;
        for (int w = lo; w <= hi; ++w)
          vm.d_idx[i][k - 1].push_back(m.add_binary(fmt("d_{}_{}_{}", i, k, w)));
      }
    }
    vm.r[i].assign(K + 1, -1);
    vm.x_start[i].assign(K + 1, -1);
    vm.x_end[i].assign(K + 1, -1);
    vm.p2[i].resize(K + 1);
    if (flags.slack) vm.slack[i].assign(K + 1, -1);
    for (int k = 0; k <= K; ++k) {
      if (k >= 1)
        vm.r[i][k] = m.add_variable(fmt("r_{}_{}", i, k), 0.0, u.cycles[k - 1].refuel_max);
      double xi_lb = k == 0 ? u.initial_fuel : 0.0;
      double xi_ub = k == 0 ? u.initial_fuel : u.cycles[k - 1].stock_max;
      vm.x_start[i][k] = m.add_variable(fmt("xs_{}_{}", i, k), xi_lb, xi_ub);
      vm.x_end[i][k] = m.add_variable(fmt("xe_{}_{}", i, k), 0.0, milp::kInf);
      vm.p2[i][k].resize(W);
      for (int w = 1; w <= W; ++w)
        vm.p2[i][k][w - 1] = m.add_variable(fmt("p_{}_{}_{}", i, k, w), 0.0, u.p_max[w - 1]);
      if (flags.slack)
        vm.slack[i][k] = m.add_variable(fmt("sl_{}_{}", i, k), 0.0, milp::kInf);
    }
    vm.x_horizon[i] = m.add_variable(fmt("xh_{}", i), 0.0, milp::kInf);
  }
  for (int j = 0; j < n1; ++j) {
    const auto& u = inst.t1_units[j];
    vm.p1[j].resize(W);
    for (int w = 1; w <= W; ++w)
      vm.p1[j][w - 1] =
          m.add_variable(fmt("q_{}_{}", j, w), u.p_min[w - 1], u.p_max[w - 1]);
  }

  for (int i = 0; i < n2; ++i) {
    const auto& u = inst.t2_units[i];
    int K = inst.num_cycles(i);

    // Monotone steps inside each window.
    for (int k = 1; k <= K; ++k) {
      int lo = vm.first_free[i][k - 1];
      if (lo < 0) continue;
      int hi = vm.last_free[i][k - 1];
      for (int w = lo + 1; w <= hi; ++w) {
        Expr e;
        e.add(vm.d(i, k, w), 1.0);
        e.add(vm.d(i, k, w - 1), -1.0);
        add_row(m, fmt("step_{}_{}_{}", i, k, w), std::move(e), Sense::ge, 0.0);
      }
    }

    // Outage k+1 cannot begin before outage k has run for its full duration.
    for (int k = 1; k < K; ++k) {
      int da = u.cycles[k - 1].duration;
      for (int w = 1; w <= W; ++w) {
        DVar next = vm.d(i, k + 1, w);
        DVar prev = vm.d(i, k, w - da);
        if (!next.is_var() && !prev.is_var() && next.value <= prev.value + 1e-9) continue;
        Expr e;
        e.add(next, 1.0);
        e.add(prev, -1.0);
        add_row(m, fmt("order_{}_{}_{}", i, k, w), std::move(e), Sense::le, 0.0);
      }
    }

    for (int k = 0; k <= K; ++k) {
      int da = k >= 1 ? u.cycles[k - 1].duration : 0;
      for (int w = 1; w <= W; ++w) {
        // Production only during the campaign of cycle k, up to capacity.
        Expr e;
        e.add(vm.p2[i][k][w - 1], 1.0);
        e.add(vm.d(i, k, w - da), -u.p_max[w - 1]);
        e.add(vm.d(i, k + 1, w), u.p_max[w - 1]);
        add_row(m, fmt("camp_{}_{}_{}", i, k, w), std::move(e),
                flags.production_equality ? Sense::eq : Sense::le, 0.0);
      }

      // Fuel consumed over the campaign.
      Expr cons;
      cons.add(vm.x_end[i][k], 1.0);
      cons.add(vm.x_start[i][k], -1.0);
      for (int w = 1; w <= W; ++w)
        cons.add(vm.p2[i][k][w - 1], inst.fuel_factor[w - 1]);
      if (flags.slack) cons.add(vm.slack[i][k], -1.0);
      add_row(m, fmt("cons_{}_{}", i, k), std::move(cons), Sense::eq, 0.0);
    }

    for (int k = 1; k <= K; ++k) {
      const auto& c = u.cycles[k - 1];
      // Refuel allowed only when the outage happens, within its bounds.
      Expr lo, hi;
      lo.add(vm.r[i][k], 1.0);
      lo.add(vm.d(i, k, W), -c.refuel_min);
      add_row(m, fmt("rmin_{}_{}", i, k), std::move(lo), Sense::ge, 0.0);
      hi.add(vm.r[i][k], 1.0);
      hi.add(vm.d(i, k, W), -c.refuel_max);
      add_row(m, fmt("rmax_{}_{}", i, k), std::move(hi), Sense::le, 0.0);

      // Fuel carried over the outage: loss on the residual, then the refuel.
      double q = c.loss_factor;
      double prev_bore = k == 1 ? u.initial_bore_null : u.cycles[k - 2].bore_null;
      Expr bal;
      bal.add(vm.x_start[i][k], 1.0);
      bal.add(vm.r[i][k], -1.0);
      bal.add(vm.x_end[i][k - 1], -(q - 1.0) / q);
      add_row(m, fmt("bal_{}_{}", i, k), std::move(bal), Sense::eq,
              c.bore_null - (q - 1.0) / q * prev_bore);

      // Fuel must be below the anticipation threshold when the outage starts.
      if (k <= flags.anticipation_limit) {
        double s_prev =
            k == 1 ? std::max(u.initial_fuel, c.stock_max_before_outage)
                   : std::max(u.cycles[k - 2].stock_max, c.stock_max_before_outage);
        double big = s_prev - c.stock_max_before_outage;
        Expr ant;
        ant.add(vm.x_end[i][k - 1], 1.0);
        ant.add(vm.d(i, k, W), big);
        add_row(m, fmt("ant_{}_{}", i, k), std::move(ant), Sense::le,
                c.stock_max_before_outage + big);
      }
    }

    // Horizon fuel is the end fuel of the last begun cycle.
    for (int k = 0; k <= K; ++k) {
      Expr e;
      e.add(vm.x_horizon[i], 1.0);
      e.add(vm.x_end[i][k], -1.0);
      e.add(vm.d(i, k, W), vm.s_bar[i]);
      e.add(vm.d(i, k + 1, W), -vm.s_bar[i]);
      add_row(m, fmt("hor_{}_{}", i, k), std::move(e), Sense::le, vm.s_bar[i]);
    }
  }

  // Weekly power balance.
  for (int w = 1; w <= W; ++w) {
    Expr e;
    for (int i = 0; i < n2; ++i)
      for (int k = 0; k <= inst.num_cycles(i); ++k) e.add(vm.p2[i][k][w - 1], 1.0);
    for (int j = 0; j < n1; ++j) e.add(vm.p1[j][w - 1], 1.0);
    add_row(m, fmt("dem_{}", w), std::move(e),
            flags.demand_sense == DemandSense::equality ? Sense::eq : Sense::ge,
            inst.demand[w - 1]);
  }

  // Resource capacities on begun outages.
  for (const auto& rc : inst.scheduling_constraints)
    for (int w : rc.weeks) {
      Expr e;
      for (size_t a = 0; a < rc.members.size(); ++a)
        e.add(vm.d(rc.members[a].unit, rc.members[a].cycle, w),
              rc.delta(static_cast<int>(a), w));
      auto it = rc.capacity.find(w);
      add_row(m, fmt("res_{}_{}", rc.id, w), std::move(e), Sense::le,
              it != rc.capacity.end() ? it->second : 0.0);
    }

  // Objective: refuel purchases plus flexible production cost minus the value
  // of fuel left at the horizon, plus any consumption slack.
  for (int i = 0; i < n2; ++i) {
    const auto& u = inst.t2_units[i];
    for (int k = 1; k <= inst.num_cycles(i); ++k)
      obj_add(m, vm.r[i][k], u.cycles[k - 1].refuel_cost);
    if (flags.credit) obj_add(m, vm.x_horizon[i], -u.final_fuel_credit);
    if (flags.slack)
      for (int k = 0; k <= inst.num_cycles(i); ++k)
        obj_add(m, vm.slack[i][k], flags.slack_cost);
  }
  for (int j = 0; j < n1; ++j)
    for (int w = 1; w <= W; ++w)
      obj_add(m, vm.p1[j][w - 1], inst.t1_units[j].cost[w - 1] * inst.fuel_factor[w - 1]);

  return {std::move(m), std::move(vm)};
}

}  // namespace

std::pair<Model, VarMap> build_compact(const ProblemInstance& instance,
                                       const FormulationOptions& options) {
  BuildFlags flags;
  flags.demand_sense = options.demand_sense;
  auto built = build_core(instance, flags);
  if (options.ct6 != Ct6Mode::off)
    add_ct6_light(built.first, built.second, instance, options.ct6);
  return built;
}

void add_stability(Model& model, VarMap& vm, const ProblemInstance& inst,
                   const StabilityOptions& options) {
  if (options.mode == StabilityMode::off) return;
  vm.stability = options;
  const int W = inst.weeks;
  if (options.mode == StabilityMode::objective) {
    for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i)
      for (int k = 1; k <= inst.num_cycles(i); ++k) {
        const auto& c = inst.cycle(i, k);
        if (options.shape != StabilityShape::custom && !c.baseline_week) {
          // No baseline: scheduling this outage at all counts as a modification.
          DVar at = vm.d(i, k, W);
          if (at.is_var())
            obj_add(model, at.idx, options.weight_scale);
          else
            model.objective_offset += options.weight_scale * at.value;
          continue;
        }
        auto penalty = [&](int w) {
          if (options.shape == StabilityShape::custom)
            return c.stability_weights.empty() ? 0.0 : c.stability_weights[w - 1];
          int b = *c.baseline_week;
          if (w == b) return 0.0;
          if (options.shape == StabilityShape::count) return 1.0;
          double dist = std::abs(w - b);
          return options.shape == StabilityShape::linear ? dist : dist * dist;
        };
        for (int w = 1; w <= W; ++w) {
          double pen = options.weight_scale * penalty(w);
          if (pen == 0.0) continue;
          DVar at = vm.d(i, k, w), before = vm.d(i, k, w - 1);
          if (at.is_var())
            obj_add(model, at.idx, pen);
          else
            model.objective_offset += pen * at.value;
          if (before.is_var())
            obj_add(model, before.idx, -pen);
          else
            model.objective_offset -= pen * before.value;
        }
      }
    return;
  }

  if (options.n_max < 0) throw DomainError("stability budget: n_max must be >= 0");
  Expr e;
  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i)
    for (int k = 1; k <= inst.num_cycles(i); ++k) {
      const auto& c = inst.cycle(i, k);
      if (c.baseline_week) {
        e.constant += 1.0;
        e.add(vm.d(i, k, *c.baseline_week - 1), 1.0);
        e.add(vm.d(i, k, *c.baseline_week), -1.0);
      } else {
        // No baseline: scheduling this outage at all counts as a modification.
        e.add(vm.d(i, k, W), 1.0);
      }
    }
  add_row(model, "budget", std::move(e), Sense::le, options.n_max);
}

std::pair<Model, VarMap> build_simplified(const ProblemInstance& instance, double slack_cost) {
  if (slack_cost <= 0.0) {
    double max_marginal = 0.0;
    for (const auto& u : instance.t1_units)
      for (int w = 1; w <= instance.weeks; ++w)
        max_marginal = std::max(max_marginal, u.cost[w - 1] * instance.fuel_factor[w - 1]);
    slack_cost = 10.0 * std::max(1.0, max_marginal) * instance.weeks;
  }
  BuildFlags flags;
  flags.demand_sense = DemandSense::at_least;
  flags.production_equality = true;
  flags.slack = true;
  flags.slack_cost = slack_cost;
  return build_core(instance, flags);
}

std::tuple<Model, VarMap, ProblemInstance> build_rrf_stage(
    const ProblemInstance& instance, int k0,
    const std::vector<std::vector<std::optional<int>>>& fixed_weeks) {
  if (k0 < 1) throw DomainError("stage index must be >= 1");
  ProblemInstance stage = instance;
  for (int i = 0; i < static_cast<int>(stage.t2_units.size()); ++i) {
    auto& u = stage.t2_units[i];
    if (static_cast<int>(u.cycles.size()) > k0 + 1) u.cycles.resize(k0 + 1);
    for (int k = 1; k < k0 && k <= static_cast<int>(u.cycles.size()); ++k) {
      auto& c = u.cycles[k - 1];
      std::optional<int> fixed =
          i < static_cast<int>(fixed_weeks.size()) &&
                  k <= static_cast<int>(fixed_weeks[i].size())
              ? fixed_weeks[i][k - 1]
              : std::nullopt;
      if (fixed) {
        if (*fixed < c.earliest || *fixed > instance.latest_start(i, k))
          throw DomainError(fmt("fixed week {} outside window of unit {} cycle {}", *fixed,
                                u.id, k));
        c.earliest = c.latest = *fixed;
      } else {
        if (instance.outage_mandatory(i, k))
          throw DomainError(
              fmt("stage {}: mandatory unit {} cycle {} has no fixed week", k0, u.id, k));
        c.earliest = c.latest = stage.weeks + 1;
      }
    }
  }
  // drop resource members whose cycle no longer exists in the stage
  for (auto& rc : stage.scheduling_constraints) {
    for (int a = static_cast<int>(rc.members.size()) - 1; a >= 0; --a) {
      const OutageRef& ref = rc.members[a];
      if (ref.cycle > static_cast<int>(stage.t2_units[ref.unit].cycles.size())) {
        rc.members.erase(rc.members.begin() + a);
        rc.cumulative.erase(rc.cumulative.begin() + a);
      }
    }
  }
  std::erase_if(stage.scheduling_constraints,
                [](const ResourceConstraint& rc) { return rc.members.empty(); });
  BuildFlags flags;
  flags.credit = false;
  flags.anticipation_limit = k0;
  auto [model, vm] = build_core(stage, flags);
  return {std::move(model), std::move(vm), std::move(stage)};
}

void add_ct6_light(Model& model, VarMap& vm, const ProblemInstance& inst, Ct6Mode mode) {
  if (mode == Ct6Mode::off) return;
  const int W = inst.weeks;
  const int n2 = static_cast<int>(inst.t2_units.size());

  if (mode == Ct6Mode::light_aggregated) {
    for (const auto& u : inst.t2_units) {
      const StretchProfile* first = nullptr;
      for (const auto& c : u.cycles) {
        if (!c.stretch_profile)
          throw DomainError("aggregated envelope needs a profile on every cycle of unit " +
                            u.id);
        if (!first)
          first = &*c.stretch_profile;
        else if (!(*first == *c.stretch_profile))
          throw DomainError("aggregated envelope needs identical profiles on unit " + u.id);
      }
    }
  }

  vm.x_residual.resize(n2);
  for (int i = 0; i < n2; ++i) {
    const auto& u = inst.t2_units[i];
    int K = inst.num_cycles(i);
    double big = vm.s_bar[i];
    vm.x_residual[i].resize(W);
    for (int w = 1; w <= W; ++w)
      vm.x_residual[i][w - 1] = model.add_variable(fmt("x_{}_{}", i, w), 0.0, big);

    // Link the weekly residual to the running fuel of whichever cycle is live.
    for (int k = 0; k <= K; ++k)
      for (int w = 1; w <= W; ++w) {
        Expr e;
        e.add(vm.x_residual[i][w - 1], 1.0);
        e.add(vm.x_start[i][k], -1.0);
        for (int wp = 1; wp <= w; ++wp)
          e.add(vm.p2[i][k][wp - 1], inst.fuel_factor[wp - 1]);
        e.add(vm.d(i, k, w), big);
        e.add(vm.d(i, k + 1, w), -big);
        add_row(model, fmt("resid_{}_{}_{}", i, k, w), std::move(e), Sense::le, big);
      }

    auto add_envelope = [&](const StretchProfile& prof, int k, int w) {
      double p_cap = u.p_max[w - 1];
      if (p_cap <= 0.0) return;
      const auto& pts = prof.points;
      for (size_t mdx = 1; mdx < pts.size(); ++mdx) {
        auto [f_prev, c_prev] = pts[mdx - 1];
        auto [f_cur, c_cur] = pts[mdx];
        double slope = (c_prev - c_cur) / (f_prev - f_cur);
        Expr e;
        if (k >= 0)
          e.add(vm.p2[i][k][w - 1], 1.0 / p_cap);
        else
          for (int kk = 0; kk <= K; ++kk) e.add(vm.p2[i][kk][w - 1], 1.0 / p_cap);
        e.add(vm.x_residual[i][w - 1], -slope);
        add_row(model, fmt("env_{}_{}_{}_{}", i, k, w, mdx), std::move(e), Sense::le,
                c_cur - slope * f_cur);
      }
    };

    if (mode == Ct6Mode::light_disaggregated) {
      if (K == 0) continue;
      for (int k = 0; k <= K; ++k) {
        // Campaign 0 runs on the first cycle's profile when one exists.
        const auto& src = u.cycles[std::max(k, 1) - 1];
        if (!src.stretch_profile) continue;
        for (int w = 1; w <= W; ++w) add_envelope(*src.stretch_profile, k, w);
      }
    } else {
      if (K == 0 || !u.cycles[0].stretch_profile) continue;
      for (int w = 1; w <= W; ++w) add_envelope(*u.cycles[0].stretch_profile, -1, w);
    }
  }
}

std::pair<Model, VarMap> build_dispatch_lp(const ProblemInstance& instance,
                                           const OutageSchedule& schedule,
                                           const FormulationOptions& options) {
  ProblemInstance pinned = instance;
  for (int i = 0; i < static_cast<int>(pinned.t2_units.size()); ++i)
    for (int k = 1; k <= pinned.num_cycles(i); ++k) {
      auto& c = pinned.cycle(i, k);
      if (schedule.scheduled(i, k))
        c.earliest = c.latest = schedule.begin(i, k);
      else
        c.earliest = c.latest = pinned.weeks + 1;
    }
  return build_compact(pinned, options);
}

Solution extract_solution(const milp::SolveOutcome& outcome, const VarMap& vm,
                          const ProblemInstance& inst) {
  if (!outcome.has_solution()) throw DomainError("no primal assignment to extract");
  const auto& v = outcome.values;

  Solution sol;
  sol.schedule = OutageSchedule::empty(inst);
  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i)
    for (int k = 1; k <= inst.num_cycles(i); ++k) {
      int lo = vm.first_free[i][k - 1];
      std::optional<int> begin;
      if (lo >= 0) {
        for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off)
          if (v[vm.d_idx[i][k - 1][off]] >= 0.5) {
            begin = lo + static_cast<int>(off);
            break;
          }
      }
      if (!begin && vm.mandatory[i][k - 1]) begin = vm.latest[i][k - 1];
      sol.schedule.week_of[i][k - 1] = begin;
    }

  sol.dispatch = DispatchPlan::zeros(inst);
  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i) {
    for (int k = 1; k <= inst.num_cycles(i); ++k)
      sol.dispatch.refuel[i][k] = v[vm.r[i][k]];
    for (int k = 0; k <= inst.num_cycles(i); ++k)
      for (int w = 1; w <= inst.weeks; ++w)
        sol.dispatch.t2_production[i][k][w - 1] = v[vm.p2[i][k][w - 1]];
  }
  for (int j = 0; j < static_cast<int>(inst.t1_units.size()); ++j)
    for (int w = 1; w <= inst.weeks; ++w)
      sol.dispatch.t1_production[j][w - 1] = v[vm.p1[j][w - 1]];

  auto sim = simulate_fuel(sol.schedule, sol.dispatch.refuel, sol.dispatch.t2_production, inst);
  for (size_t i = 0; i < inst.t2_units.size(); ++i) {
    for (size_t k = 0; k < sim.fuel_start[i].size(); ++k) {
      sol.dispatch.fuel_start[i][k] = sim.fuel_start[i][k];
      sol.dispatch.fuel_end[i][k] = sim.fuel_end[i][k];
    }
    sol.dispatch.horizon_fuel[i] = sim.horizon_fuel[i];
  }

  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i) {
    const auto& u = inst.t2_units[i];
    for (int k = 1; k <= inst.num_cycles(i); ++k)
      sol.cost.refuel_cost += u.cycles[k - 1].refuel_cost * sol.dispatch.refuel[i][k];
    sol.cost.final_fuel_credit += u.final_fuel_credit * sol.dispatch.horizon_fuel[i];
    if (!vm.slack.empty())
      for (int k = 0; k <= inst.num_cycles(i); ++k)
        sol.cost.penalty_slack += vm.slack_cost * v[vm.slack[i][k]];
  }
  for (int j = 0; j < static_cast<int>(inst.t1_units.size()); ++j)
    for (int w = 1; w <= inst.weeks; ++w)
      sol.cost.t1_cost += inst.t1_units[j].cost[w - 1] * inst.fuel_factor[w - 1] *
                          sol.dispatch.t1_production[j][w - 1];
  if (vm.stability.mode == StabilityMode::objective)
    sol.cost.stability =
        vm.stability.weight_scale * stability_cost(sol.schedule, inst, vm.stability.shape);

  sol.violations = validate(sol, inst);
  return sol;
}

std::vector<double> warmstart_assignment(const Model& model, const VarMap& vm,
                                         const Solution& sol, const ProblemInstance& inst) {
  std::vector<double> v(model.variables.size(), 0.0);
  for (size_t x = 0; x < model.variables.size(); ++x)
    v[x] = std::clamp(0.0, model.variables[x].lb, model.variables[x].ub);

  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i) {
    const auto& u = inst.t2_units[i];
    int K = inst.num_cycles(i);
    for (int k = 1; k <= K; ++k) {
      int lo = vm.first_free[i][k - 1];
      for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off)
        v[vm.d_idx[i][k - 1][off]] =
            sol.schedule.step(i, k, lo + static_cast<int>(off)) ? 1.0 : 0.0;
      v[vm.r[i][k]] = sol.dispatch.refuel[i][k];
    }
    for (int k = 0; k <= K; ++k)
      for (int w = 1; w <= inst.weeks; ++w)
        v[vm.p2[i][k][w - 1]] = sol.dispatch.t2_production[i][k][w - 1];

    // Fuel chain across every cycle, matching the model's balance equalities.
    double xs = u.initial_fuel, xe = 0.0;
    for (int k = 0; k <= K; ++k) {
      if (k >= 1) {
        const auto& c = u.cycles[k - 1];
        double prev_bore = k == 1 ? u.initial_bore_null : u.cycles[k - 2].bore_null;
        xs = c.bore_null + sol.dispatch.refuel[i][k] +
             (c.loss_factor - 1.0) / c.loss_factor * (xe - prev_bore);
      }
      double cons = 0.0;
      for (int w = 1; w <= inst.weeks; ++w)
        cons += inst.fuel_factor[w - 1] * sol.dispatch.t2_production[i][k][w - 1];
      xe = xs - cons;
      if (!vm.slack.empty() && xe < 0.0) {
        v[vm.slack[i][k]] = -xe;
        xe = 0.0;
      }
      v[vm.x_start[i][k]] = xs;
      v[vm.x_end[i][k]] = xe;
      if (vm.d(i, k, inst.weeks).is_var() || vm.d(i, k, inst.weeks).value == 1.0) {
        bool begun = sol.schedule.step(i, k, inst.weeks) == 1;
        bool next_begun = sol.schedule.step(i, k + 1, inst.weeks) == 1;
        if (begun && !next_begun) v[vm.x_horizon[i]] = std::max(0.0, xe);
      }
    }

    if (!vm.x_residual.empty()) {
      auto sim =
          simulate_fuel(sol.schedule, sol.dispatch.refuel, sol.dispatch.t2_production, inst);
      for (int w = 1; w <= inst.weeks; ++w)
        v[vm.x_residual[i][w - 1]] =
            std::clamp(sim.weekly_residual[i][w - 1], 0.0, vm.s_bar[i]);
    }
  }
  for (int j = 0; j < static_cast<int>(inst.t1_units.size()); ++j)
    for (int w = 1; w <= inst.weeks; ++w)
      v[vm.p1[j][w - 1]] = sol.dispatch.t1_production[j][w - 1];
  return v;
}

}  // namespace nucsched
