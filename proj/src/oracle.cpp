#include "nucsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "nucsched/strfmt.hpp"

namespace nucsched {

namespace {

using UnitWeeks = std::vector<std::optional<int>>;

// All CT13-consistent begin-week sequences for one unit.
std::vector<UnitWeeks> unit_sequences(const ProblemInstance& inst, int i) {
  int K = inst.num_cycles(i);
  std::vector<UnitWeeks> out;
  UnitWeeks current(K);
  std::function<void(int, int)> recurse = [&](int k, int min_begin) {
    if (k > K) {
      out.push_back(current);
      return;
    }
    bool tail_optional = true;
    for (int kk = k; kk <= K; ++kk)
      if (inst.outage_mandatory(i, kk)) tail_optional = false;
    if (tail_optional) {
      for (int kk = k; kk <= K; ++kk) current[kk - 1].reset();
      out.push_back(current);
    }
    const auto& c = inst.cycle(i, k);
    int lo = std::max({1, c.earliest, min_begin});
    int hi = inst.latest_start(i, k);
    for (int w = lo; w <= hi; ++w) {
      current[k - 1] = w;
      recurse(k + 1, w + c.duration);
    }
    current[k - 1].reset();
  };
  recurse(1, 1);
  return out;
}

std::vector<int> lex_key(const OutageSchedule& s, int weeks) {
  std::vector<int> key;
  for (const auto& unit : s.week_of)
    for (const auto& w : unit) key.push_back(w ? *w : weeks + 2);
  return key;
}

bool resource_ok(const ProblemInstance& inst, const OutageSchedule& s) {
  for (const auto& rc : inst.scheduling_constraints)
    for (int w : rc.weeks) {
      double used = 0.0;
      for (size_t a = 0; a < rc.members.size(); ++a)
        if (s.step(rc.members[a].unit, rc.members[a].cycle, w) == 1)
          used += rc.delta(static_cast<int>(a), w);
      auto it = rc.capacity.find(w);
      double cap = it != rc.capacity.end() ? it->second : 0.0;
      if (used > cap + 1e-9) return false;
    }
  return true;
}

struct EnumOutput {
  OracleResult result;
  std::vector<OutageSchedule> feasible;
};

EnumOutput enumerate_impl(const ProblemInstance& inst, const OracleLimits& limits,
                          bool collect_costs, bool collect_schedules,
                          const std::function<bool(const OutageSchedule&)>& admit) {
  inst.check_valid();
  int n2 = static_cast<int>(inst.t2_units.size());
  std::vector<std::vector<UnitWeeks>> per_unit(n2);
  double total = 1.0;
  for (int i = 0; i < n2; ++i) {
    per_unit[i] = unit_sequences(inst, i);
    total *= static_cast<double>(per_unit[i].size());
    if (total > static_cast<double>(limits.max_schedules))
      throw DomainError(fmt("enumeration would visit more than {} schedules; use a smaller "
                            "instance or raise the limit",
                            limits.max_schedules));
  }

  EnumOutput out;
  milp::SolveConfig lp_config;
  lp_config.time_limit = limits.lp_time_limit;

  std::vector<size_t> odo(n2, 0);
  std::vector<int> best_key;
  double best_cost = milp::kInf;
  bool done = n2 == 0 || total == 0.0;
  while (!done) {
    OutageSchedule cand = OutageSchedule::empty(inst);
    for (int i = 0; i < n2; ++i) cand.week_of[i] = per_unit[i][odo[i]];

    if (!admit || admit(cand)) {
      ++out.result.n_candidates;
      if (resource_ok(inst, cand)) {
        auto [model, vm] = build_dispatch_lp(inst, cand);
        auto outcome = milp::solve(model, lp_config);
        if (outcome.has_solution()) {
          ++out.result.n_feasible;
          double cost = outcome.objective;
          if (collect_costs) out.result.all_costs.push_back(cost);
          if (collect_schedules) out.feasible.push_back(cand);
          auto key = lex_key(cand, inst.weeks);
          if (!out.result.found || cost < best_cost - 1e-9 ||
              (std::abs(cost - best_cost) <= 1e-9 && key < best_key)) {
            out.result.best = extract_solution(outcome, vm, inst);
            out.result.found = true;
            best_cost = cost;
            best_key = key;
          }
        }
      }
    }

    int pos = n2 - 1;
    while (pos >= 0 && ++odo[pos] == per_unit[pos].size()) odo[pos--] = 0;
    done = pos < 0;
  }
  return out;
}

std::function<bool(const OutageSchedule&)> make_admit(const ProblemInstance& inst,
                                                      const Solution& incumbent,
                                                      const NeighborhoodSpec& spec) {
  const auto& base = incumbent.schedule;
  using V = NeighborhoodSpec::Variant;
  switch (spec.variant) {
    case V::time_window:
      return [&inst, base, spec](const OutageSchedule& cand) {
        for (int i = 0; i < static_cast<int>(cand.week_of.size()); ++i)
          for (int k = 1; k <= inst.num_cycles(i); ++k) {
            if (!base.scheduled(i, k)) {
              if (cand.scheduled(i, k)) return false;
              continue;
            }
            if (!cand.scheduled(i, k)) return false;
            int radius = spec.a * k + spec.b;
            if (std::abs(cand.begin(i, k) - base.begin(i, k)) > radius) return false;
          }
        return true;
      };
    case V::units: {
      std::vector<bool> free_unit(inst.t2_units.size(), false);
      for (int i : spec.unit_set) free_unit[i] = true;
      return [free_unit, base](const OutageSchedule& cand) {
        for (size_t i = 0; i < cand.week_of.size(); ++i)
          if (!free_unit[i] && cand.week_of[i] != base.week_of[i]) return false;
        return true;
      };
    }
    case V::cycles:
      return [spec, base](const OutageSchedule& cand) {
        for (size_t i = 0; i < cand.week_of.size(); ++i)
          for (size_t k = 1; k <= cand.week_of[i].size(); ++k)
            if ((static_cast<int>(k) < spec.k_lo || static_cast<int>(k) > spec.k_hi) &&
                cand.week_of[i][k - 1] != base.week_of[i][k - 1])
              return false;
        return true;
      };
    case V::local_branching:
      return [&inst, base, spec](const OutageSchedule& cand) {
        long dist = 0;
        for (int i = 0; i < static_cast<int>(cand.week_of.size()); ++i)
          for (int k = 1; k <= inst.num_cycles(i); ++k) {
            const auto& c = inst.cycle(i, k);
            int lo = std::max(1, c.earliest);
            int hi = inst.outage_mandatory(i, k) ? c.latest - 1 : inst.weeks;
            for (int w = lo; w <= hi; ++w)
              dist += std::abs(cand.step(i, k, w) - base.step(i, k, w));
          }
        return dist <= spec.budget;
      };
    case V::rins: {
      // Fix the steps on which the incumbent and the root relaxation agree.
      auto [model, vm] = build_compact(inst);
      milp::SolveConfig cfg;
      cfg.time_limit = 60.0;
      auto relax = milp::solve_lp_relaxation(model, cfg);
      std::vector<std::tuple<int, int, int, int>> fixed;   // (i, k, w, value)
      if (relax.has_solution()) {
        for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i)
          for (int k = 1; k <= inst.num_cycles(i); ++k) {
            int lo = vm.first_free[i][k - 1];
            for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off) {
              double lpv = relax.values[vm.d_idx[i][k - 1][off]];
              int w = lo + static_cast<int>(off);
              int incv = base.step(i, k, w);
              if (std::abs(lpv - incv) <= 1e-6) fixed.emplace_back(i, k, w, incv);
            }
          }
      }
      return [fixed](const OutageSchedule& cand) {
        for (const auto& [i, k, w, val] : fixed)
          if (cand.step(i, k, w) != val) return false;
        return true;
      };
    }
  }
  return {};
}

}  // namespace

OracleResult enumerate_optimal(const ProblemInstance& instance, const OracleLimits& limits,
                               bool collect_costs) {
  return enumerate_impl(instance, limits, collect_costs, false, nullptr).result;
}

OracleResult restricted_optimal(const ProblemInstance& instance, const Solution& incumbent,
                                const NeighborhoodSpec& spec, const OracleLimits& limits) {
  auto admit = make_admit(instance, incumbent, spec);
  return enumerate_impl(instance, limits, false, false, admit).result;
}

std::vector<OutageSchedule> enumerate_feasible_schedules(const ProblemInstance& instance,
                                                         const OracleLimits& limits) {
  return enumerate_impl(instance, limits, false, true, nullptr).feasible;
}

std::vector<std::pair<int, double>> oracle_frontier(const ProblemInstance& instance,
                                                    const OutageSchedule& baseline,
                                                    const OracleLimits& limits) {
  auto out = enumerate_impl(instance, limits, true, true, nullptr);
  std::map<int, double> best_by_mods;
  for (size_t s = 0; s < out.feasible.size(); ++s) {
    int mods = static_cast<int>(std::llround(
        stability_cost_against(out.feasible[s], baseline, instance, StabilityShape::count)));
    double cost = out.result.all_costs[s];
    auto it = best_by_mods.find(mods);
    if (it == best_by_mods.end() || cost < it->second) best_by_mods[mods] = cost;
  }
  std::vector<std::pair<int, double>> frontier;
  double best = milp::kInf;
  for (const auto& [mods, cost] : best_by_mods)
    if (cost < best - 1e-9) {
      frontier.emplace_back(mods, cost);
      best = cost;
    }
  return frontier;
}

}  // namespace nucsched
