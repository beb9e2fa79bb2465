#pragma once

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nucsched::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  bool integer = false;
};

enum class Sense { le, eq, ge };

struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;   // (variable index, coefficient)
  Sense sense = Sense::le;
  double rhs = 0.0;
};

// Immutable once handed to solve(); minimization only.
struct Model {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<double> objective;   // per variable, missing tail treated as 0
  double objective_offset = 0.0;

  int add_variable(const std::string& name, double lb, double ub, bool integer = false);
  int add_binary(const std::string& name);
  void add_constraint(const std::string& name, std::vector<std::pair<int, double>> terms,
                      Sense sense, double rhs);
  void set_objective(int var, double coefficient);

  // Throws on dangling variable references or duplicate names.
  void check_well_formed() const;
};

struct SolveConfig {
  double time_limit = 60.0;             // seconds
  double rel_gap_tol = 1e-4;
  double abs_gap_tol = 1e-9;
  std::optional<std::vector<double>> warmstart;   // full assignment
  bool aggressive_heuristics = false;
  std::optional<int> cut_passes;
  bool presolve = true;
  int threads = 1;
};

enum class SolveStatus { optimal, feasible_limit, infeasible, unbounded, no_solution_limit };

struct SolveOutcome {
  SolveStatus status = SolveStatus::no_solution_limit;
  std::vector<double> values;
  double objective = 0.0;
  double dual_bound = 0.0;
  double runtime = 0.0;
  long nodes = 0;

  bool has_solution() const {
    return status == SolveStatus::optimal || status == SolveStatus::feasible_limit;
  }
};

struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Branch and bound on the model. With a feasible warmstart the outcome is
// never worse than the warmstart objective.
SolveOutcome solve(const Model& model, const SolveConfig& config);

// Same model with integrality dropped.
SolveOutcome solve_lp_relaxation(const Model& model, const SolveConfig& config);

// Checks a full assignment against bounds, integrality and constraints.
bool assignment_feasible(const Model& model, const std::vector<double>& values,
                         double tol = 1e-6);
double assignment_objective(const Model& model, const std::vector<double>& values);

enum class ExportFormat { lp, mps };

struct ExportResult {
  std::string text;
  std::map<std::string, std::string> renamed;   // original -> sanitized
};

ExportResult export_model(const Model& model, ExportFormat format);

}  // namespace nucsched::milp
