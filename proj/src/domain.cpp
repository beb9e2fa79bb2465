#include "nucsched/domain.hpp"

#include <algorithm>
#include <cmath>
#include "nucsched/strfmt.hpp"
#include <numeric>

namespace nucsched {

void ProblemInstance::check_valid() const {
  std::vector<std::string> errors;
  auto require = [&errors](bool condition, const std::string& message) {
    if (!condition) errors.push_back(message);
    return condition;
  };

  require(weeks >= 1, "weeks: must be >= 1");
  bool w_ok =
      require(static_cast<int>(demand.size()) == weeks, "demand: length must equal weeks") &&
      require(static_cast<int>(fuel_factor.size()) == weeks,
              "fuel_factor: length must equal weeks");
  if (w_ok) {
    for (int w = 0; w < weeks; ++w) {
      require(fuel_factor[w] > 0.0, fmt("fuel_factor[{}]: must be > 0", w + 1));
      require(demand[w] >= 0.0, fmt("demand[{}]: must be >= 0", w + 1));
    }
  }
  for (const auto& u : t1_units) {
    std::string path = "t1_units[" + u.id + "]";
    bool ok =
        require(static_cast<int>(u.p_min.size()) == weeks,
                path + ".p_min: length must equal weeks") &&
        require(static_cast<int>(u.p_max.size()) == weeks,
                path + ".p_max: length must equal weeks") &&
        require(static_cast<int>(u.cost.size()) == weeks,
                path + ".cost: length must equal weeks");
    if (ok)
      for (int w = 0; w < weeks; ++w)
        require(u.p_min[w] >= 0.0 && u.p_min[w] <= u.p_max[w],
                fmt("{}.p_min[{}]: need 0 <= p_min <= p_max", path, w + 1));
  }
  for (const auto& u : t2_units) {
    std::string path = "t2_units[" + u.id + "]";
    if (require(static_cast<int>(u.p_max.size()) == weeks,
                path + ".p_max: length must equal weeks"))
      for (int w = 0; w < weeks; ++w)
        require(u.p_max[w] >= 0.0, fmt("{}.p_max[{}]: must be >= 0", path, w + 1));
    require(u.initial_fuel >= 0.0, path + ".initial_fuel: must be >= 0");
    for (size_t kk = 0; kk < u.cycles.size(); ++kk) {
      const auto& c = u.cycles[kk];
      std::string cp = fmt("{}.cycles[{}]", path, kk + 1);
      require(c.duration >= 1, cp + ".duration: must be >= 1");
      require(c.earliest <= c.latest, cp + ".earliest: must be <= latest");
      require(c.refuel_min >= 0.0 && c.refuel_min <= c.refuel_max,
              cp + ".refuel_min: need 0 <= refuel_min <= refuel_max");
      require(c.loss_factor > 0.0 && c.loss_factor < 1.0,
              cp + ".loss_factor: must be in (0,1)");
      require(c.stock_max_before_outage >= 0.0 && c.stock_max_before_outage <= c.stock_max,
              cp + ".stock_max_before_outage: need 0 <= value <= stock_max");
      require(c.bore_null <= c.stock_max, cp + ".bore_null: must be <= stock_max");
      if (!c.stability_weights.empty())
        require(static_cast<int>(c.stability_weights.size()) == weeks,
                cp + ".stability_weights: length must equal weeks");
      if (c.stretch_profile) {
        const auto& pts = c.stretch_profile->points;
        if (require(pts.size() >= 2, cp + ".stretch_profile: needs >= 2 points")) {
          require(std::abs(pts.front().second - 1.0) < 1e-12,
                  cp + ".stretch_profile: first coefficient must be 1");
          require(std::abs(pts.front().first - c.bore_null) < 1e-9,
                  cp + ".stretch_profile: first fuel level must equal bore_null");
          for (size_t m = 1; m < pts.size(); ++m) {
            require(pts[m].first < pts[m - 1].first,
                    cp + ".stretch_profile: fuel levels must be strictly decreasing");
            require(pts[m].second <= pts[m - 1].second,
                    cp + ".stretch_profile: coefficients must be non-increasing");
            require(pts[m].second >= 0.0 && pts[m].second <= 1.0,
                    cp + ".stretch_profile: coefficients must be in [0,1]");
          }
        }
      }
    }
  }
  for (const auto& rc : scheduling_constraints) {
    std::string path = "scheduling_constraints[" + rc.id + "]";
    require(rc.cumulative.size() == rc.members.size(),
            path + ".consumption: one profile per member required");
    for (const auto& m : rc.members) {
      if (require(m.unit >= 0 && m.unit < static_cast<int>(t2_units.size()),
                  path + ".members: unknown unit index"))
        require(m.cycle >= 1 && m.cycle <= num_cycles(m.unit),
                path + ".members: cycle out of range");
    }
    for (int w : rc.weeks)
      require(w >= 1 && w <= weeks, path + ".weeks: week out of [1, weeks]");
    for (const auto& prof : rc.cumulative)
      require(static_cast<int>(prof.size()) == weeks,
              path + ".consumption: profile length must equal weeks");
    for (const auto& [w, cap] : rc.capacity)
      require(w >= 1 && w <= weeks, path + ".capacity: week out of [1, weeks]");
  }

  if (!errors.empty()) {
    std::string joined;
    for (size_t e = 0; e < errors.size(); ++e) {
      if (e) joined += "; ";
      joined += errors[e];
    }
    throw DomainError(joined);
  }
}

OutageSchedule OutageSchedule::empty(const ProblemInstance& instance) {
  OutageSchedule s;
  s.week_of.resize(instance.t2_units.size());
  for (size_t i = 0; i < instance.t2_units.size(); ++i)
    s.week_of[i].assign(instance.t2_units[i].cycles.size(), std::nullopt);
  return s;
}

DispatchPlan DispatchPlan::zeros(const ProblemInstance& instance) {
  DispatchPlan d;
  size_t n2 = instance.t2_units.size();
  d.refuel.resize(n2);
  d.t2_production.resize(n2);
  d.fuel_start.resize(n2);
  d.fuel_end.resize(n2);
  d.horizon_fuel.assign(n2, 0.0);
  for (size_t i = 0; i < n2; ++i) {
    int nk = static_cast<int>(instance.t2_units[i].cycles.size());
    d.refuel[i].assign(nk + 1, 0.0);
    d.fuel_start[i].assign(nk + 1, 0.0);
    d.fuel_end[i].assign(nk + 1, 0.0);
    d.t2_production[i].assign(nk + 1, std::vector<double>(instance.weeks, 0.0));
  }
  d.t1_production.assign(instance.t1_units.size(),
                         std::vector<double>(instance.weeks, 0.0));
  return d;
}

namespace {

void check_dispatch_dims(const DispatchPlan& d, const ProblemInstance& instance) {
  auto fail = [](const std::string& what) {
    throw DomainError("dispatch dimension mismatch: " + what);
  };
  if (d.refuel.size() != instance.t2_units.size()) fail("refuel");
  if (d.t2_production.size() != instance.t2_units.size()) fail("t2_production");
  if (d.t1_production.size() != instance.t1_units.size()) fail("t1_production");
  if (d.horizon_fuel.size() != instance.t2_units.size()) fail("horizon_fuel");
  for (size_t i = 0; i < instance.t2_units.size(); ++i) {
    size_t nk = instance.t2_units[i].cycles.size() + 1;
    if (d.refuel[i].size() != nk) fail("refuel[" + instance.t2_units[i].id + "]");
    if (d.t2_production[i].size() != nk)
      fail("t2_production[" + instance.t2_units[i].id + "]");
    for (const auto& row : d.t2_production[i])
      if (static_cast<int>(row.size()) != instance.weeks)
        fail("t2_production[" + instance.t2_units[i].id + "] week axis");
  }
  for (size_t j = 0; j < instance.t1_units.size(); ++j)
    if (static_cast<int>(d.t1_production[j].size()) != instance.weeks)
      fail("t1_production[" + instance.t1_units[j].id + "]");
}

}  // namespace

double financial_cost(const DispatchPlan& dispatch, const ProblemInstance& instance) {
  check_dispatch_dims(dispatch, instance);
  double refuel = 0.0, t1 = 0.0, credit = 0.0;
  for (size_t i = 0; i < instance.t2_units.size(); ++i) {
    const auto& u = instance.t2_units[i];
    for (int k = 1; k <= instance.num_cycles(static_cast<int>(i)); ++k)
      refuel += u.cycles[k - 1].refuel_cost * dispatch.refuel[i][k];
    credit += u.final_fuel_credit * dispatch.horizon_fuel[i];
  }
  for (size_t j = 0; j < instance.t1_units.size(); ++j) {
    const auto& u = instance.t1_units[j];
    for (int w = 0; w < instance.weeks; ++w)
      t1 += u.cost[w] * instance.fuel_factor[w] * dispatch.t1_production[j][w];
  }
  return refuel + t1 - credit;
}

namespace {

double shape_penalty(StabilityShape shape, int week, int baseline) {
  if (week == baseline) return 0.0;
  switch (shape) {
    case StabilityShape::count: return 1.0;
    case StabilityShape::linear: return std::abs(week - baseline);
    case StabilityShape::quadratic: {
      double d = week - baseline;
      return d * d;
    }
    default: return 0.0;
  }
}

}  // namespace

double stability_cost(const OutageSchedule& schedule, const ProblemInstance& instance,
                      StabilityShape shape) {
  double total = 0.0;
  std::string missing;
  for (size_t i = 0; i < instance.t2_units.size(); ++i) {
    for (int k = 1; k <= instance.num_cycles(static_cast<int>(i)); ++k) {
      if (!schedule.scheduled(static_cast<int>(i), k)) continue;
      const auto& c = instance.cycle(static_cast<int>(i), k);
      int w = schedule.begin(static_cast<int>(i), k);
      if (shape == StabilityShape::custom) {
        if (!c.stability_weights.empty()) total += c.stability_weights[w - 1];
        continue;
      }
      if (!c.baseline_week) {
        missing += fmt(" ({},{})", instance.t2_units[i].id, k);
        continue;
      }
      total += shape_penalty(shape, w, *c.baseline_week);
    }
  }
  if (!missing.empty())
    throw DomainError("stability_cost: baseline week missing for cycles:" + missing);
  return total;
}

double stability_cost_against(const OutageSchedule& schedule, const OutageSchedule& baseline,
                              const ProblemInstance& instance, StabilityShape shape) {
  double total = 0.0;
  for (size_t i = 0; i < instance.t2_units.size(); ++i) {
    for (int k = 1; k <= instance.num_cycles(static_cast<int>(i)); ++k) {
      int ii = static_cast<int>(i);
      bool s = schedule.scheduled(ii, k), b = baseline.scheduled(ii, k);
      if (!s && !b) continue;
      if (s != b) {
        total += 1.0;   // appeared or disappeared: one modification regardless of shape
        continue;
      }
      total += shape_penalty(shape, schedule.begin(ii, k), baseline.begin(ii, k));
    }
  }
  return total;
}

FuelSimulation simulate_fuel(const OutageSchedule& schedule,
                             const std::vector<std::vector<double>>& refuels,
                             const std::vector<std::vector<std::vector<double>>>& t2_production,
                             const ProblemInstance& instance) {
  FuelSimulation sim;
  size_t n2 = instance.t2_units.size();
  sim.fuel_start.resize(n2);
  sim.fuel_end.resize(n2);
  sim.horizon_fuel.assign(n2, 0.0);
  sim.weekly_residual.assign(n2, std::vector<double>(instance.weeks, 0.0));
  sim.last_started_cycle.assign(n2, 0);

  for (size_t i = 0; i < n2; ++i) {
    int ii = static_cast<int>(i);
    const auto& u = instance.t2_units[i];
    int nk = instance.num_cycles(ii);
    int last = 0;
    for (int k = 1; k <= nk && schedule.scheduled(ii, k); ++k) last = k;
    sim.last_started_cycle[i] = last;
    sim.fuel_start[i].assign(last + 1, 0.0);
    sim.fuel_end[i].assign(last + 1, 0.0);

    sim.fuel_start[i][0] = u.initial_fuel;
    for (int k = 0; k <= last; ++k) {
      if (k >= 1) {
        const auto& c = u.cycles[k - 1];
        double prev_bore = k == 1 ? u.initial_bore_null : u.cycles[k - 2].bore_null;
        double q = c.loss_factor;
        sim.fuel_start[i][k] = c.bore_null + refuels[i][k] +
                               (q - 1.0) / q * (sim.fuel_end[i][k - 1] - prev_bore);
      }
      double consumed = 0.0;
      for (int w = 1; w <= instance.weeks; ++w)
        consumed += instance.fuel_factor[w - 1] * t2_production[i][k][w - 1];
      sim.fuel_end[i][k] = sim.fuel_start[i][k] - consumed;
    }
    sim.horizon_fuel[i] = sim.fuel_end[i][last];

    // Weekly residual: within-cycle cumulative depletion. Week w belongs to
    // cycle k from the beginning of outage k until outage k+1 begins.
    for (int k = 0; k <= last; ++k) {
      int from = k == 0 ? 1 : schedule.begin(ii, k);
      int to = k < last ? schedule.begin(ii, k + 1) - 1 : instance.weeks;
      double level = sim.fuel_start[i][k];
      for (int w = from; w <= to && w <= instance.weeks; ++w) {
        level -= instance.fuel_factor[w - 1] * t2_production[i][k][w - 1];
        sim.weekly_residual[i][w - 1] = level;
      }
    }
  }
  return sim;
}

namespace {

void add_violation(std::vector<Violation>& out, const std::string& tag,
                   const std::string& where, double magnitude) {
  out.push_back({tag, where, magnitude});
}

}  // namespace

std::vector<Violation> validate(const Solution& solution, const ProblemInstance& instance) {
  const auto& sched = solution.schedule;
  const auto& d = solution.dispatch;
  check_dispatch_dims(d, instance);
  if (sched.week_of.size() != instance.t2_units.size())
    throw DomainError("schedule dimension mismatch: week_of");

  std::vector<Violation> v;
  int W = instance.weeks;
  int n2 = static_cast<int>(instance.t2_units.size());

  // CT13: no skipped cycles, windows, outage ordering.
  for (int i = 0; i < n2; ++i) {
    const auto& uid = instance.t2_units[i].id;
    bool stopped = false;
    for (int k = 1; k <= instance.num_cycles(i); ++k) {
      if (!sched.scheduled(i, k)) {
        stopped = true;
        continue;
      }
      if (stopped) {
        add_violation(v, "CT13", fmt("unit={} cycle={} scheduled after a skipped cycle", uid, k), 1.0);
        continue;
      }
      int b = sched.begin(i, k);
      const auto& c = instance.cycle(i, k);
      if (b < c.earliest || b > instance.latest_start(i, k))
        add_violation(v, "CT13", fmt("unit={} cycle={} week={} outside window [{},{}]",
                                             uid, k, b, c.earliest, instance.latest_start(i, k)),
                      std::max(c.earliest - b, b - instance.latest_start(i, k)));
      if (k >= 2 && sched.scheduled(i, k - 1)) {
        int prev_end = sched.begin(i, k - 1) + instance.cycle(i, k - 1).duration;
        if (b < prev_end)
          add_violation(v, "CT13", fmt("unit={} cycle={} week={} overlaps outage {}", uid, k, b, k - 1),
                        prev_end - b);
      }
    }
    for (int k = 1; k <= instance.num_cycles(i); ++k)
      if (instance.outage_mandatory(i, k) && !sched.scheduled(i, k))
        add_violation(v, "CT13", fmt("unit={} cycle={} mandatory but unscheduled",
                                             instance.t2_units[i].id, k), 1.0);
  }

  // CT1: weekly demand balance.
  for (int w = 1; w <= W; ++w) {
    double total = 0.0;
    for (int i = 0; i < n2; ++i)
      for (const auto& row : d.t2_production[i]) total += row[w - 1];
    for (size_t j = 0; j < instance.t1_units.size(); ++j) total += d.t1_production[j][w - 1];
    double dev = std::abs(total - instance.demand[w - 1]);
    if (dev > kBalanceTol)
      add_violation(v, "CT1", fmt("week={}", w), dev);
  }

  // CT2: T1 bounds.
  for (size_t j = 0; j < instance.t1_units.size(); ++j) {
    const auto& u = instance.t1_units[j];
    for (int w = 1; w <= W; ++w) {
      double p = d.t1_production[j][w - 1];
      if (p < u.p_min[w - 1] - kBalanceTol || p > u.p_max[w - 1] + kBalanceTol)
        add_violation(v, "CT2", fmt("unit={} week={}", u.id, w),
                      std::max(u.p_min[w - 1] - p, p - u.p_max[w - 1]));
    }
  }

  // CT3-5: T2 production null during outages / outside campaigns, bounded by p_max.
  for (int i = 0; i < n2; ++i) {
    const auto& u = instance.t2_units[i];
    int nk = instance.num_cycles(i);
    for (int k = 0; k <= nk; ++k) {
      // Campaign k spans [begin_k + Da_k, begin_{k+1} - 1] (cycle 0 from week 1).
      int from = k == 0 ? 1
                        : (sched.scheduled(i, k) ? sched.begin(i, k) + u.cycles[k - 1].duration
                                                 : W + 1);
      int to = (k < nk && sched.scheduled(i, k + 1)) ? sched.begin(i, k + 1) - 1 : W;
      if (k > 0 && !sched.scheduled(i, k)) to = 0;
      for (int w = 1; w <= W; ++w) {
        double p = d.t2_production[i][k][w - 1];
        if (p < -kBalanceTol)
          add_violation(v, "CT3", fmt("unit={} cycle={} week={} negative production", u.id, k, w), -p);
        if (w >= from && w <= to) {
          if (p > u.p_max[w - 1] + kBalanceTol)
            add_violation(v, "CT5", fmt("unit={} cycle={} week={}", u.id, k, w),
                          p - u.p_max[w - 1]);
        } else if (p > kBalanceTol) {
          add_violation(v, "CT3", fmt("unit={} cycle={} week={} outside campaign", u.id, k, w), p);
        }
      }
    }
  }

  // CT7: refuel bounds.
  for (int i = 0; i < n2; ++i) {
    const auto& u = instance.t2_units[i];
    for (int k = 1; k <= instance.num_cycles(i); ++k) {
      double r = d.refuel[i][k];
      const auto& c = u.cycles[k - 1];
      if (sched.scheduled(i, k)) {
        if (r < c.refuel_min - kBalanceTol || r > c.refuel_max + kBalanceTol)
          add_violation(v, "CT7", fmt("unit={} cycle={}", u.id, k),
                        std::max(c.refuel_min - r, r - c.refuel_max));
      } else if (std::abs(r) > kBalanceTol) {
        add_violation(v, "CT7", fmt("unit={} cycle={} refuel without outage", u.id, k),
                      std::abs(r));
      }
    }
  }

  // CT8-10: fuel dynamics must match the simulation.
  auto sim = simulate_fuel(sched, d.refuel, d.t2_production, instance);
  for (int i = 0; i < n2; ++i) {
    const auto& u = instance.t2_units[i];
    int last = sim.last_started_cycle[i];
    for (int k = 0; k <= last; ++k) {
      if (std::abs(d.fuel_start[i][k] - sim.fuel_start[i][k]) > kBalanceTol)
        add_violation(v, "CT9", fmt("unit={} cycle={} fuel_start", u.id, k),
                      std::abs(d.fuel_start[i][k] - sim.fuel_start[i][k]));
      if (std::abs(d.fuel_end[i][k] - sim.fuel_end[i][k]) > kBalanceTol)
        add_violation(v, "CT9", fmt("unit={} cycle={} fuel_end", u.id, k),
                      std::abs(d.fuel_end[i][k] - sim.fuel_end[i][k]));
    }
    if (std::abs(d.horizon_fuel[i] - sim.horizon_fuel[i]) > kBalanceTol)
      add_violation(v, "CT9", fmt("unit={} horizon_fuel", u.id),
                    std::abs(d.horizon_fuel[i] - sim.horizon_fuel[i]));
  }

  // CT11: stock bounds, anticipation threshold, nonnegative residual fuel.
  for (int i = 0; i < n2; ++i) {
    const auto& u = instance.t2_units[i];
    int last = sim.last_started_cycle[i];
    for (int k = 1; k <= last; ++k) {
      const auto& c = u.cycles[k - 1];
      if (sim.fuel_start[i][k] > c.stock_max + kBalanceTol)
        add_violation(v, "CT11", fmt("unit={} cycle={} stock above max", u.id, k),
                      sim.fuel_start[i][k] - c.stock_max);
      if (sim.fuel_end[i][k - 1] > c.stock_max_before_outage + kBalanceTol)
        add_violation(v, "CT11",
                      fmt("unit={} cycle={} fuel above anticipation threshold", u.id, k),
                      sim.fuel_end[i][k - 1] - c.stock_max_before_outage);
    }
    for (int w = 1; w <= W; ++w)
      if (sim.weekly_residual[i][w - 1] < -kBalanceTol)
        add_violation(v, "CT11", fmt("unit={} week={} negative fuel", u.id, w),
                      -sim.weekly_residual[i][w - 1]);
  }

  // CT14-21: resource constraints.
  for (const auto& rc : instance.scheduling_constraints) {
    for (int w : rc.weeks) {
      double used = 0.0;
      for (size_t a = 0; a < rc.members.size(); ++a) {
        const auto& m = rc.members[a];
        if (sched.step(m.unit, m.cycle, w) == 1)
          used += rc.delta(static_cast<int>(a), w);
      }
      auto it = rc.capacity.find(w);
      double cap = it != rc.capacity.end() ? it->second : 0.0;
      if (used > cap + kBalanceTol)
        add_violation(v, "CT14-21", fmt("constraint={} week={}", rc.id, w), used - cap);
    }
  }

  return v;
}

double gap(double value, double bks) {
  if (bks <= 0.0) throw DomainError("gap: bks must be > 0");
  return std::abs(value - bks) / bks;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  double pos = q * (sorted.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

GapStats aggregate_stats(const std::vector<double>& gaps, const std::vector<double>& thresholds) {
  GapStats s;
  std::vector<double> valid;
  for (double g : gaps) {
    if (g > 1.0) {
      ++s.n_failures;
    } else {
      valid.push_back(g);
    }
  }
  s.n_valid = static_cast<int>(valid.size());
  for (double t : thresholds) {
    int count = 0;
    for (double g : valid)
      if (g <= t) ++count;
    s.n_below.emplace_back(t, count);
  }
  if (valid.empty()) return s;
  s.mean = std::accumulate(valid.begin(), valid.end(), 0.0) / valid.size();
  double ss = 0.0;
  for (double g : valid) ss += (g - s.mean) * (g - s.mean);
  s.stddev = std::sqrt(ss / valid.size());
  std::sort(valid.begin(), valid.end());
  s.q1 = quantile(valid, 0.25);
  s.q2 = quantile(valid, 0.5);
  s.q3 = quantile(valid, 0.75);
  return s;
}

}  // namespace nucsched
