#pragma once

#include <string>

#include "nucsched/formulation.hpp"

namespace nucsched {

// One MILP neighborhood: a restriction of the full model around an incumbent.
struct NeighborhoodSpec {
  enum class Variant { rins, local_branching, units, cycles, time_window };
  Variant variant = Variant::time_window;
  int budget = 0;             // local_branching: max step flips
  std::vector<int> unit_set;  // units: indices kept free
  int k_lo = 1, k_hi = 1;     // cycles: range kept free
  int a = 0, b = 0;           // time_window: radius a*k + b around incumbent weeks
  double time_limit = 10.0;
  double gap_tol = 1e-4;

  static NeighborhoodSpec rins();
  static NeighborhoodSpec local_branching(int k);
  static NeighborhoodSpec units(std::vector<int> unit_set);
  static NeighborhoodSpec cycles(int k_lo, int k_hi);
  static NeighborhoodSpec time_window(int a, int b);

  std::string label() const;
};

struct SequencePolicy {
  enum class Stopping { all_local_min, max_iterations, wallclock };
  std::vector<NeighborhoodSpec> neighborhoods;
  Stopping stopping = Stopping::all_local_min;
  int max_iterations = 1000;
  double wallclock_seconds = 1e18;
};

struct DescentTrace {
  struct Row {
    int iteration = 0;
    std::string neighborhood;
    std::string status;
    double objective_before = 0.0;
    double objective_after = 0.0;
    double seconds = 0.0;
  };
  std::vector<Row> rows;

  std::string to_csv() const;
};

struct VndConfig {
  double total_time_limit = 1e18;
  bool aggressive_heuristics = false;
  int threads = 1;
};

// Builds the restricted copy of `model` in which only the moves admitted by
// `spec` around the incumbent remain; the incumbent always stays feasible.
milp::Model restrict(const milp::Model& model, const VarMap& varmap,
                     const Solution& incumbent, const NeighborhoodSpec& spec);

// Warmstarted steepest descent rotating over the policy's neighborhoods.
std::pair<Solution, DescentTrace> vnd(const ProblemInstance& instance, const Solution& initial,
                                      const SequencePolicy& policy, const VndConfig& config = {});

enum class PartitionKind { per_unit, per_site, per_cycle };

std::vector<NeighborhoodSpec> popmusic_partitions(const ProblemInstance& instance,
                                                  PartitionKind kind, int min_size = 1);

}  // namespace nucsched
