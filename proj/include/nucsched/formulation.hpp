#pragma once

#include <climits>

#include "nucsched/domain.hpp"
#include "nucsched/milp.hpp"

namespace nucsched {

// Handle to a step variable: either a model column or a fixed constant.
struct DVar {
  int idx = -1;
  double value = 0.0;

  bool is_var() const { return idx >= 0; }
};

enum class DemandSense { equality, at_least };
enum class Ct6Mode { off, light_disaggregated, light_aggregated };
enum class StabilityMode { off, objective, budget };

struct StabilityOptions {
  StabilityMode mode = StabilityMode::off;
  StabilityShape shape = StabilityShape::count;
  double weight_scale = 1.0;   // multiplies the shape penalty in objective mode
  int n_max = 0;               // budget mode
};

struct FormulationOptions {
  DemandSense demand_sense = DemandSense::equality;
  Ct6Mode ct6 = Ct6Mode::off;
};

// Variable handles for one built model. Step variables d_{i,k,w} exist only
// on the free part of each window; elsewhere d() returns a constant.
struct VarMap {
  int weeks = 0;
  std::vector<std::vector<int>> first_free, last_free;   // [i][k-1], -1 when pinned
  std::vector<std::vector<bool>> mandatory;              // latest <= weeks
  std::vector<std::vector<int>> latest;                  // begin week when pinned mandatory
  std::vector<std::vector<std::vector<int>>> d_idx;      // [i][k-1][w - first_free]
  std::vector<std::vector<int>> r;                       // [i][k], k >= 1 (index k)
  std::vector<std::vector<int>> x_start, x_end;          // [i][k], k = 0..K
  std::vector<int> x_horizon;                            // [i]
  std::vector<std::vector<std::vector<int>>> p2;         // [i][k][w-1], k = 0..K
  std::vector<std::vector<int>> p1;                      // [j][w-1]
  std::vector<std::vector<int>> slack;                   // [i][k] or empty
  std::vector<std::vector<int>> x_residual;              // [i][w-1] or empty
  std::vector<double> s_bar;                             // per unit, max stock cap
  double slack_cost = 0.0;
  bool credit_in_objective = true;
  StabilityOptions stability;

  // Step value or variable for any k = 0..K+1 and any w (clamped conventions:
  // cycle 0 always begun, cycle K+1 never, weeks before the window are 0).
  DVar d(int i, int k, int w) const;
};

// Full MILP of the planning problem.
std::pair<milp::Model, VarMap> build_compact(const ProblemInstance& instance,
                                             const FormulationOptions& options = {});

// Adds a stability term: objective mode charges the move penalty at the begin
// week; budget mode caps the number of modified outages.
void add_stability(milp::Model& model, VarMap& varmap, const ProblemInstance& instance,
                   const StabilityOptions& options);

// Aggressive approximation: nuclear production pinned to its coupling bound,
// demand relaxed to at-least, fuel balance softened by priced slacks.
std::pair<milp::Model, VarMap> build_simplified(const ProblemInstance& instance,
                                                double slack_cost = -1.0);

// Stage model: cycles k < k0 pinned to fixed weeks, cycles k0 and k0+1 free,
// later cycles dropped, final-fuel credit dropped, anticipation only up to k0.
// Also returns the reduced instance the model was built on, needed to extract.
std::tuple<milp::Model, VarMap, ProblemInstance> build_rrf_stage(
    const ProblemInstance& instance, int k0,
    const std::vector<std::vector<std::optional<int>>>& fixed_weeks);

// Piecewise production envelope on residual fuel below the bore-null level.
void add_ct6_light(milp::Model& model, VarMap& varmap, const ProblemInstance& instance,
                   Ct6Mode mode);

// LP with every outage pinned to the given schedule.
std::pair<milp::Model, VarMap> build_dispatch_lp(const ProblemInstance& instance,
                                                 const OutageSchedule& schedule,
                                                 const FormulationOptions& options = {});

// Rounds the steps, rebuilds the schedule and fuel state, recomputes costs and
// attaches validation results.
Solution extract_solution(const milp::SolveOutcome& outcome, const VarMap& varmap,
                          const ProblemInstance& instance);

// Full assignment matching `model`'s columns for use as a warmstart.
std::vector<double> warmstart_assignment(const milp::Model& model, const VarMap& varmap,
                                         const Solution& solution,
                                         const ProblemInstance& instance);

}  // namespace nucsched
