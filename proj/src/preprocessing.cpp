#include "nucsched/preprocessing.hpp"

#include <algorithm>
#include <cmath>

#include "nucsched/instance_io.hpp"
#include "nucsched/strfmt.hpp"

namespace nucsched {

std::string ReductionReport::to_csv() const {
  std::string out =
      "unit,cycle,old_earliest,old_latest,new_earliest,new_latest,made_optional\n";
  for (const auto& c : changes)
    out += fmt("{},{},{},{},{},{},{}\n", c.unit, c.cycle, c.old_earliest, c.old_latest,
               c.new_earliest, c.new_latest, c.made_optional ? 1 : 0);
  return out;
}

namespace {

void record_change(ReductionReport& report, int i, int k, const CycleSpec& before,
                   const CycleSpec& after, int weeks) {
  if (before.earliest == after.earliest && before.latest == after.latest) return;
  report.changes.push_back({i, k, before.earliest, before.latest, after.earliest, after.latest,
                            before.latest <= weeks && after.latest > weeks});
}

// Largest energy one unit can burn in a single week given its cap and the
// demand balance.
double max_weekly_burn(const ProblemInstance& inst, const T2Unit& u) {
  double burn = 0.0;
  for (int w = 0; w < inst.weeks; ++w)
    burn = std::max(burn, inst.fuel_factor[w] * std::min(u.p_max[w], inst.demand[w]));
  return burn;
}

}  // namespace

std::pair<ProblemInstance, ReductionReport> tighten_exact(const ProblemInstance& instance) {
  ProblemInstance inst = instance;
  ReductionReport report;
  report.binaries_before = count_free_binaries(instance);

  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i) {
    auto& u = inst.t2_units[i];
    int K = static_cast<int>(u.cycles.size());
    double burn = max_weekly_burn(inst, u);

    for (int pass = 0; pass < K; ++pass) {
      bool changed = false;

      // Bounds on the start-of-cycle fuel level, per cycle index k = 0..K.
      // fuel_min uses the minimal refuel against the largest allowed residual;
      // fuel_max the maximal refuel against an empty residual, capped by the
      // stock limit. Both are valid for every feasible dispatch.
      std::vector<double> fuel_min(K + 1, 0.0), fuel_max(K + 1, 0.0);
      fuel_min[0] = fuel_max[0] = u.initial_fuel;
      for (int k = 1; k <= K; ++k) {
        const auto& c = u.cycles[k - 1];
        double prev_bore = k == 1 ? u.initial_bore_null : u.cycles[k - 2].bore_null;
        double q = c.loss_factor;
        double residual_cap = std::min(c.stock_max_before_outage, fuel_max[k - 1]);
        fuel_min[k] = std::max(
            0.0, c.bore_null + c.refuel_min - (1.0 - q) / q * (residual_cap - prev_bore));
        fuel_max[k] = std::min(
            c.stock_max, c.bore_null + c.refuel_max + (1.0 - q) / q * std::max(0.0, prev_bore));
      }

      for (int k = 1; k <= K; ++k) {
        auto& c = u.cycles[k - 1];
        if (c.earliest > inst.weeks && c.latest > inst.weeks) continue;   // already removed
        CycleSpec before = c;

        // first campaign week of the previous cycle
        int campaign_start = k == 1 ? 1 : u.cycles[k - 2].earliest + u.cycles[k - 2].duration;
        double excess = fuel_min[k - 1] - c.stock_max_before_outage;
        int depletion_weeks =
            excess <= 0.0 ? 0
                          : (burn <= 0.0 ? inst.weeks + 1
                                         : static_cast<int>(std::ceil(excess / burn - 1e-12)));
        int bound = campaign_start + depletion_weeks;
        if (bound > c.earliest) {
          if (instance.outage_mandatory(i, k) && bound > c.latest) {
            report.infeasible = true;
            report.infeasible_where +=
                fmt("{}unit={} cycle={} window [{},{}] empty after earliest start {}",
                    report.infeasible_where.empty() ? "" : "; ", u.id, k, c.earliest, c.latest,
                    bound);
            continue;
          }
          if (bound > inst.weeks) {
            // unreachable within the horizon: the outage can never run
            c.earliest = inst.weeks + 1;
            c.latest = std::max(c.latest, inst.weeks + 1);
          } else {
            c.earliest = bound;
          }
          changed = true;
        }
        record_change(report, i, k, before, c, inst.weeks);
      }
      if (!changed) break;
    }
  }

  report.binaries_after = count_free_binaries(inst);
  return {std::move(inst), std::move(report)};
}

std::pair<ProblemInstance, ReductionReport> tighten_max_cycle_length(
    const ProblemInstance& instance, int max_weeks) {
  if (max_weeks < 1) throw DomainError("max_weeks must be >= 1");
  ProblemInstance inst = instance;
  ReductionReport report;
  report.heuristic = true;
  report.binaries_before = count_free_binaries(instance);

  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i) {
    auto& u = inst.t2_units[i];
    for (int k = 2; k <= static_cast<int>(u.cycles.size()); ++k) {
      auto& c = u.cycles[k - 1];
      if (c.latest > inst.weeks) continue;   // keep optional outages optional
      const auto& prev = u.cycles[k - 2];
      int cap = std::min(prev.latest, inst.weeks) + prev.duration + max_weeks;
      if (cap < c.latest) {
        CycleSpec before = c;
        c.latest = std::max(cap, c.earliest);   // a heuristic cut never empties the window
        record_change(report, i, k, before, c, inst.weeks);
      }
    }
  }

  report.binaries_after = count_free_binaries(inst);
  return {std::move(inst), std::move(report)};
}

std::pair<ProblemInstance, ReductionReport> fix_from_lp(const ProblemInstance& instance,
                                                        const VarMap& vm,
                                                        const std::vector<double>& lp_values) {
  constexpr double eps = 1e-6;
  ProblemInstance inst = instance;
  ReductionReport report;
  report.heuristic = true;
  report.binaries_before = count_free_binaries(instance);

  for (int i = 0; i < static_cast<int>(inst.t2_units.size()); ++i) {
    auto& u = inst.t2_units[i];
    for (int k = 1; k <= static_cast<int>(u.cycles.size()); ++k) {
      int lo = vm.first_free[i][k - 1];
      if (lo < 0) continue;
      auto& c = u.cycles[k - 1];
      CycleSpec before = c;

      int last_zero = -1, first_one = -1;
      for (size_t off = 0; off < vm.d_idx[i][k - 1].size(); ++off) {
        double val = lp_values[vm.d_idx[i][k - 1][off]];
        int w = lo + static_cast<int>(off);
        if (val <= eps) last_zero = w;
        if (first_one < 0 && val >= 1.0 - eps) first_one = w;
      }
      if (last_zero >= 0 && last_zero + 1 > c.earliest) c.earliest = last_zero + 1;
      if (first_one >= 0 && instance.outage_mandatory(i, k) && first_one < c.latest)
        c.latest = std::max(first_one, c.earliest);
      if (c.earliest > c.latest) c.earliest = c.latest;
      record_change(report, i, k, before, c, inst.weeks);
    }
  }

  report.binaries_after = count_free_binaries(inst);
  return {std::move(inst), std::move(report)};
}

}  // namespace nucsched
