#include "nucsched/localsearch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "nucsched/strfmt.hpp"

namespace nucsched {

NeighborhoodSpec NeighborhoodSpec::rins() {
  NeighborhoodSpec s;
  s.variant = Variant::rins;
  return s;
}

NeighborhoodSpec NeighborhoodSpec::local_branching(int k) {
  NeighborhoodSpec s;
  s.variant = Variant::local_branching;
  s.budget = k;
  return s;
}

NeighborhoodSpec NeighborhoodSpec::units(std::vector<int> unit_set) {
  NeighborhoodSpec s;
  s.variant = Variant::units;
  s.unit_set = std::move(unit_set);
  return s;
}

NeighborhoodSpec NeighborhoodSpec::cycles(int k_lo, int k_hi) {
  NeighborhoodSpec s;
  s.variant = Variant::cycles;
  s.k_lo = k_lo;
  s.k_hi = k_hi;
  return s;
}

NeighborhoodSpec NeighborhoodSpec::time_window(int a, int b) {
  NeighborhoodSpec s;
  s.variant = Variant::time_window;
  s.a = a;
  s.b = b;
  return s;
}

std::string NeighborhoodSpec::label() const {
  switch (variant) {
    case Variant::rins: return "rins";
    case Variant::local_branching: return fmt("local_branching({})", budget);
    case Variant::units: {
      std::string ids;
      for (size_t n = 0; n < unit_set.size(); ++n)
        ids += (n ? "|" : "") + std::to_string(unit_set[n]);
      return "units(" + ids + ")";
    }
    case Variant::cycles: return fmt("cycles({},{})", k_lo, k_hi);
    case Variant::time_window: return fmt("time_window({},{})", a, b);
  }
  return "?";
}

std::string DescentTrace::to_csv() const {
  std::string out = "iteration,neighborhood,status,objective_before,objective_after,seconds\n";
  for (const auto& r : rows)
    out += fmt("{},{},{},{},{},{}\n", r.iteration, r.neighborhood, r.status,
               r.objective_before, r.objective_after, r.seconds);
  return out;
}

namespace {

// Fixes one step variable to a constant by closing its bounds.
void fix_var(milp::Model& m, int idx, double value) {
  m.variables[idx].lb = value;
  m.variables[idx].ub = value;
}

// Pin every free step of (i, k) to the incumbent's steps.
void fix_cycle_to_incumbent(milp::Model& m, const VarMap& vm, const Solution& inc, int i, int k) {
  int lo = vm.first_free[i][k - 1];
  if (lo < 0) return;
  for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off)
    fix_var(m, vm.d_idx[i][k - 1][off],
            static_cast<double>(inc.schedule.step(i, k, lo + static_cast<int>(off))));
}

}  // namespace

milp::Model restrict(const milp::Model& model, const VarMap& vm, const Solution& incumbent,
                     const NeighborhoodSpec& spec) {
  milp::Model m = model;
  int n2 = static_cast<int>(vm.first_free.size());

  switch (spec.variant) {
    case NeighborhoodSpec::Variant::time_window: {
      for (int i = 0; i < n2; ++i) {
        for (int k = 1; k <= static_cast<int>(vm.first_free[i].size()); ++k) {
          int lo_free = vm.first_free[i][k - 1];
          if (lo_free < 0) continue;
          if (!incumbent.schedule.scheduled(i, k)) {
            // skipped outages stay skipped
            for (int idx : vm.d_idx[i][k - 1]) fix_var(m, idx, 0.0);
            continue;
          }
          int radius = spec.a * k + spec.b;
          int w0 = incumbent.schedule.begin(i, k);
          for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off) {
            int w = lo_free + static_cast<int>(off);
            if (w < w0 - radius) fix_var(m, vm.d_idx[i][k - 1][off], 0.0);
            if (w >= w0 + radius) fix_var(m, vm.d_idx[i][k - 1][off], 1.0);
          }
        }
      }
      break;
    }
    case NeighborhoodSpec::Variant::units: {
      std::set<int> free_units(spec.unit_set.begin(), spec.unit_set.end());
      for (int i = 0; i < n2; ++i) {
        if (free_units.count(i)) continue;
        for (int k = 1; k <= static_cast<int>(vm.first_free[i].size()); ++k)
          fix_cycle_to_incumbent(m, vm, incumbent, i, k);
      }
      break;
    }
    case NeighborhoodSpec::Variant::cycles: {
      for (int i = 0; i < n2; ++i)
        for (int k = 1; k <= static_cast<int>(vm.first_free[i].size()); ++k)
          if (k < spec.k_lo || k > spec.k_hi) fix_cycle_to_incumbent(m, vm, incumbent, i, k);
      break;
    }
    case NeighborhoodSpec::Variant::local_branching: {
      // Hamming distance over the free steps: sum_{step0=0} d + sum_{step0=1} (1 - d) <= budget
      std::vector<std::pair<int, double>> terms;
      double ones = 0.0;
      for (int i = 0; i < n2; ++i)
        for (int k = 1; k <= static_cast<int>(vm.first_free[i].size()); ++k) {
          int lo = vm.first_free[i][k - 1];
          if (lo < 0) continue;
          for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off) {
            int s0 = incumbent.schedule.step(i, k, lo + static_cast<int>(off));
            terms.emplace_back(vm.d_idx[i][k - 1][off], s0 ? -1.0 : 1.0);
            ones += s0;
          }
        }
      m.add_constraint("hamming_budget", std::move(terms), milp::Sense::le,
                       static_cast<double>(spec.budget) - ones);
      break;
    }
    case NeighborhoodSpec::Variant::rins: {
      milp::SolveConfig cfg;
      cfg.time_limit = std::max(1.0, spec.time_limit);
      milp::SolveOutcome lp = milp::solve_lp_relaxation(model, cfg);
      if (!lp.has_solution()) break;   // nothing to fix; the full model remains
      for (int i = 0; i < n2; ++i)
        for (int k = 1; k <= static_cast<int>(vm.first_free[i].size()); ++k) {
          int lo = vm.first_free[i][k - 1];
          if (lo < 0) continue;
          for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off) {
            int idx = vm.d_idx[i][k - 1][off];
            double inc_val = incumbent.schedule.step(i, k, lo + static_cast<int>(off));
            if (std::abs(lp.values[idx] - inc_val) <= 1e-6) fix_var(m, idx, inc_val);
          }
        }
      break;
    }
  }
  return m;
}

std::pair<Solution, DescentTrace> vnd(const ProblemInstance& instance, const Solution& initial,
                                      const SequencePolicy& policy, const VndConfig& config) {
  if (policy.neighborhoods.empty()) throw DomainError("vnd: no neighborhoods given");

  auto [model, vm] = build_compact(instance);
  Solution incumbent = initial;
  double inc_obj = financial_cost(incumbent.dispatch, instance);

  DescentTrace trace;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  int iteration = 0;
  int stale = 0;   // neighborhoods since the last improvement
  size_t cursor = 0;
  while (true) {
    if (policy.stopping == SequencePolicy::Stopping::all_local_min &&
        stale >= static_cast<int>(policy.neighborhoods.size()))
      break;
    if (iteration >= policy.max_iterations) break;
    if (elapsed() >= policy.wallclock_seconds || elapsed() >= config.total_time_limit) break;

    const NeighborhoodSpec& spec = policy.neighborhoods[cursor];
    cursor = (cursor + 1) % policy.neighborhoods.size();
    ++iteration;

    DescentTrace::Row row;
    row.iteration = iteration;
    row.neighborhood = spec.label();
    row.objective_before = inc_obj;
    double t_start = elapsed();

    try {
      milp::Model sub = restrict(model, vm, incumbent, spec);
      milp::SolveConfig cfg;
      cfg.time_limit = spec.time_limit;
      cfg.rel_gap_tol = spec.gap_tol;
      cfg.aggressive_heuristics = config.aggressive_heuristics;
      cfg.threads = config.threads;
      std::vector<double> ws = warmstart_assignment(sub, vm, incumbent, instance);
      if (milp::assignment_feasible(sub, ws)) cfg.warmstart = ws;
      milp::SolveOutcome out = milp::solve(sub, cfg);
      if (out.has_solution() && out.objective < inc_obj - 1e-9) {
        Solution cand = extract_solution(out, vm, instance);
        if (cand.feasible()) {
          incumbent = std::move(cand);
          inc_obj = financial_cost(incumbent.dispatch, instance);
          stale = 0;
          row.status = "improved";
        } else {
          ++stale;
          row.status = "rejected";
        }
      } else {
        ++stale;
        row.status = out.has_solution() ? "local_min" : "no_solution";
      }
    } catch (const std::exception& e) {
      ++stale;
      row.status = std::string("error: ") + e.what();
    }

    row.objective_after = inc_obj;
    row.seconds = elapsed() - t_start;
    trace.rows.push_back(row);
  }
  return {incumbent, trace};
}

std::vector<NeighborhoodSpec> popmusic_partitions(const ProblemInstance& instance,
                                                  PartitionKind kind, int min_size) {
  std::vector<NeighborhoodSpec> out;
  int n2 = static_cast<int>(instance.t2_units.size());

  switch (kind) {
    case PartitionKind::per_unit: {
      for (int i = 0; i < n2; ++i) out.push_back(NeighborhoodSpec::units({i}));
      break;
    }
    case PartitionKind::per_cycle: {
      int max_k = 0;
      for (int i = 0; i < n2; ++i) max_k = std::max(max_k, instance.num_cycles(i));
      for (int k = 1; k <= max_k; ++k) out.push_back(NeighborhoodSpec::cycles(k, k));
      break;
    }
    case PartitionKind::per_site: {
      // connected components of the "shares a resource constraint" graph
      std::vector<int> parent(n2);
      for (int i = 0; i < n2; ++i) parent[i] = i;
      std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
      };
      for (const auto& rc : instance.scheduling_constraints)
        for (size_t a = 1; a < rc.members.size(); ++a)
          parent[find(rc.members[a].unit)] = find(rc.members[0].unit);
      std::map<int, std::vector<int>> groups;
      for (int i = 0; i < n2; ++i) groups[find(i)].push_back(i);

      // merge small components until each part reaches min_size
      std::vector<std::vector<int>> parts;
      for (auto& [root, members] : groups) {
        if (!parts.empty() && static_cast<int>(parts.back().size()) < min_size) {
          parts.back().insert(parts.back().end(), members.begin(), members.end());
        } else {
          parts.push_back(std::move(members));
        }
      }
      if (parts.size() >= 2 && static_cast<int>(parts.back().size()) < min_size) {
        auto tail = std::move(parts.back());
        parts.pop_back();
        parts.back().insert(parts.back().end(), tail.begin(), tail.end());
      }
      for (auto& p : parts) {
        std::sort(p.begin(), p.end());
        out.push_back(NeighborhoodSpec::units(p));
      }
      break;
    }
  }
  return out;
}

}  // namespace nucsched
