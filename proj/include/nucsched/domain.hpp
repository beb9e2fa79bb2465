#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Core model of the refueling-and-maintenance planning problem: input data,
// schedules, dispatch plans, cost evaluation, fuel simulation and constraint
// validation. Everything here is plain data plus pure functions; no solver
// machinery is involved.
namespace nucsched {

// Absolute tolerance on power/fuel balance checks.
inline constexpr double kBalanceTol = 1e-6;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-linear production upper envelope below the bore-null fuel level.
// points[m] = (fuel level f_m, power coefficient c_m), f strictly decreasing,
// c_0 = 1 at f_0 = bore_null, c non-increasing.
struct StretchProfile {
  std::vector<std::pair<double, double>> points;

  bool operator==(const StretchProfile&) const = default;
};

// One maintenance cycle of a nuclear unit: the outage (refueling + repairs)
// followed by the production campaign. Weeks are 1-based; `latest > W` marks
// the outage as optional.
struct CycleSpec {
  int duration = 1;                  // outage length in weeks
  int earliest = 1;                  // first possible beginning week
  int latest = 1;                    // last possible beginning week (may exceed W)
  double refuel_min = 0.0;
  double refuel_max = 0.0;
  double refuel_cost = 0.0;          // money per unit of fuel loaded
  double loss_factor = 0.9;          // fraction of residual fuel kept, in (0,1)
  double bore_null = 0.0;            // stretch threshold fuel level
  double stock_max = 0.0;            // max fuel level during the cycle
  double stock_max_before_outage = 0.0;  // fuel must be below this to start THIS outage
  std::optional<int> baseline_week;
  std::vector<double> stability_weights;   // per week, empty unless custom shape
  std::optional<StretchProfile> stretch_profile;

  bool operator==(const CycleSpec&) const = default;
};

// Flexible (thermal) power plant with weekly bounds and proportional cost.
struct T1Unit {
  std::string id;
  std::vector<double> p_min;   // size W
  std::vector<double> p_max;   // size W
  std::vector<double> cost;    // size W, money per unit of energy

  bool operator==(const T1Unit&) const = default;
};

// Nuclear power plant. Cycle k (1-based) is stored at cycles[k-1]; cycle 0
// denotes initial conditions (initial_fuel, initial_bore_null).
struct T2Unit {
  std::string id;
  std::vector<double> p_max;       // size W
  double initial_fuel = 0.0;       // fuel on hand at week 1
  double initial_bore_null = 0.0;  // bore-null level of cycle 0
  double final_fuel_credit = 0.0;  // money per unit of fuel left at horizon end
  std::vector<CycleSpec> cycles;

  bool operator==(const T2Unit&) const = default;
};

// Reference to outage k of a T2 unit (unit = index into t2_units, cycle = k >= 1).
struct OutageRef {
  int unit = 0;
  int cycle = 0;

  auto operator<=>(const OutageRef&) const = default;
};

// Capacity limit on the resource consumed by a set of outages. The profile is
// stored cumulatively: member a that has begun at or before week w consumes
// cumulative[a][w-1] - cumulative[a][w-2] at week w.
struct ResourceConstraint {
  std::string id;
  std::vector<OutageRef> members;
  std::vector<int> weeks;                           // weeks where the cap applies
  std::vector<std::vector<double>> cumulative;      // aligned with members, size W each
  std::map<int, double> capacity;                   // week -> cap

  bool operator==(const ResourceConstraint&) const = default;

  double delta(int member_index, int week) const {
    const auto& cum = cumulative[member_index];
    double prev = week >= 2 ? cum[week - 2] : 0.0;
    return cum[week - 1] - prev;
  }
};

struct ProblemInstance {
  int weeks = 0;                     // W
  std::vector<double> demand;        // size W
  std::vector<double> fuel_factor;   // size W, all > 0
  std::vector<T1Unit> t1_units;
  std::vector<T2Unit> t2_units;
  std::vector<ResourceConstraint> scheduling_constraints;

  bool operator==(const ProblemInstance&) const = default;

  int num_cycles(int i) const { return static_cast<int>(t2_units[i].cycles.size()); }
  const CycleSpec& cycle(int i, int k) const { return t2_units[i].cycles[k - 1]; }
  CycleSpec& cycle(int i, int k) { return t2_units[i].cycles[k - 1]; }

  // An outage is mandatory when its whole window fits in the horizon.
  bool outage_mandatory(int i, int k) const { return cycle(i, k).latest <= weeks; }
  int latest_start(int i, int k) const { return std::min(cycle(i, k).latest, weeks); }

  // Throws DomainError naming the offending field on any invariant violation.
  void check_valid() const;
};

inline constexpr int kNotScheduled = -1;

// Beginning week per (unit, cycle), or unscheduled. week_of[i][k-1].
struct OutageSchedule {
  std::vector<std::vector<std::optional<int>>> week_of;

  bool operator==(const OutageSchedule&) const = default;

  static OutageSchedule empty(const ProblemInstance& instance);

  bool scheduled(int i, int k) const { return week_of[i][k - 1].has_value(); }
  int begin(int i, int k) const { return *week_of[i][k - 1]; }

  // Step projection: 1 iff outage k of unit i has begun at or before week w.
  // Cycle 0 is always begun; cycles beyond the last one never are.
  int step(int i, int k, int w) const {
    if (k == 0) return 1;
    if (k > static_cast<int>(week_of[i].size())) return 0;
    const auto& b = week_of[i][k - 1];
    return b && *b <= w ? 1 : 0;
  }
};

// Continuous decision layer: refuels, productions, fuel levels.
// Cycle-indexed arrays run k = 0..K at index k (refuel[i][k] with refuel[i][0] = 0).
struct DispatchPlan {
  std::vector<std::vector<double>> refuel;                       // [i][k], k=0..K
  std::vector<std::vector<std::vector<double>>> t2_production;   // [i][k][w-1]
  std::vector<std::vector<double>> t1_production;                // [j][w-1]
  std::vector<std::vector<double>> fuel_start;                   // [i][k] = x^i
  std::vector<std::vector<double>> fuel_end;                     // [i][k] = x^f
  std::vector<double> horizon_fuel;                              // [i] = x^f_i

  static DispatchPlan zeros(const ProblemInstance& instance);
};

struct CostBreakdown {
  double refuel_cost = 0.0;
  double t1_cost = 0.0;
  double final_fuel_credit = 0.0;
  double stability = 0.0;
  double penalty_slack = 0.0;   // simplified-model slack terms only

  double financial() const { return refuel_cost + t1_cost - final_fuel_credit; }
};

struct Violation {
  std::string constraint;   // CT tag, e.g. "CT3"
  std::string where;        // indices, e.g. "unit=u1 cycle=2 week=14"
  double magnitude = 0.0;
};

struct Solution {
  OutageSchedule schedule;
  DispatchPlan dispatch;
  CostBreakdown cost;
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
};

struct GapStats {
  double mean = 0.0;
  double stddev = 0.0;            // population form, 1/n
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
  std::vector<std::pair<double, int>> n_below;   // (threshold, count of gaps <= threshold)
  int n_failures = 0;                            // gaps > 100%
  int n_valid = 0;                               // gaps entering the statistics
};

enum class StabilityShape { count, linear, quadratic, custom };

// Result of simulating the fuel dynamics for a given schedule and production.
struct FuelSimulation {
  std::vector<std::vector<double>> fuel_start;     // [i][k], k = 0..last started
  std::vector<std::vector<double>> fuel_end;       // [i][k]
  std::vector<double> horizon_fuel;                // [i]
  std::vector<std::vector<double>> weekly_residual;  // [i][w-1], within-cycle depletion
  std::vector<int> last_started_cycle;             // [i], 0 when no outage runs
};

// Financial objective: refuel costs plus T1 production costs minus the credit
// for fuel left at the horizon. T1 cost carries the weekly fuel factor.
double financial_cost(const DispatchPlan& dispatch, const ProblemInstance& instance);

// Penalty for moving outages away from their baseline weeks. Built-in shapes
// need a baseline week on every scheduled cycle; custom reads
// CycleSpec::stability_weights.
double stability_cost(const OutageSchedule& schedule, const ProblemInstance& instance,
                      StabilityShape shape);

// As stability_cost but against an explicit baseline (overrides the instance's
// baseline weeks); cycles without a baseline entry count as "modified iff scheduled".
double stability_cost_against(const OutageSchedule& schedule, const OutageSchedule& baseline,
                              const ProblemInstance& instance, StabilityShape shape);

// Pure fuel arithmetic. Negative intermediate levels are returned as-is;
// validation flags them.
FuelSimulation simulate_fuel(const OutageSchedule& schedule,
                             const std::vector<std::vector<double>>& refuels,
                             const std::vector<std::vector<std::vector<double>>>& t2_production,
                             const ProblemInstance& instance);

// Checks every in-scope constraint and returns all violations found. Never
// throws on bad solutions, only on malformed array dimensions.
std::vector<Violation> validate(const Solution& solution, const ProblemInstance& instance);

// |value - bks| / bks. Throws DomainError when bks <= 0.
double gap(double value, double bks);

// Aggregates gap statistics; gaps above 100% are failures and are excluded
// from mean/stddev/quartiles. Quartiles use linear interpolation.
GapStats aggregate_stats(const std::vector<double>& gaps,
                         const std::vector<double>& thresholds = {1e-4, 5e-4, 1e-2});

}  // namespace nucsched
