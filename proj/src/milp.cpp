#include "nucsched/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "Highs.h"
#include "nucsched/strfmt.hpp"

namespace nucsched::milp {

int Model::add_variable(const std::string& name, double lb, double ub, bool integer) {
  variables.push_back({name, lb, ub, integer});
  return static_cast<int>(variables.size()) - 1;
}

int Model::add_binary(const std::string& name) { return add_variable(name, 0.0, 1.0, true); }

void Model::add_constraint(const std::string& name, std::vector<std::pair<int, double>> terms,
                           Sense sense, double rhs) {
  constraints.push_back({name, std::move(terms), sense, rhs});
}

void Model::set_objective(int var, double coefficient) {
  if (objective.size() <= static_cast<size_t>(var)) objective.resize(var + 1, 0.0);
  objective[var] = coefficient;
}

void Model::check_well_formed() const {
  std::set<std::string> names;
  for (const auto& v : variables)
    if (!names.insert(v.name).second)
      throw BackendError("duplicate variable name: " + v.name);
  names.clear();
  for (const auto& c : constraints) {
    if (!names.insert(c.name).second) throw BackendError("duplicate constraint name: " + c.name);
    for (const auto& [idx, coef] : c.terms) {
      (void)coef;
      if (idx < 0 || idx >= static_cast<int>(variables.size()))
        throw BackendError(fmt("constraint {} references unknown variable index {}", c.name, idx));
    }
  }
  if (objective.size() > variables.size())
    throw BackendError("objective references more variables than declared");
}

double assignment_objective(const Model& model, const std::vector<double>& values) {
  double obj = model.objective_offset;
  for (size_t v = 0; v < model.objective.size(); ++v) obj += model.objective[v] * values[v];
  return obj;
}

bool assignment_feasible(const Model& model, const std::vector<double>& values, double tol) {
  if (values.size() != model.variables.size()) return false;
  for (size_t v = 0; v < values.size(); ++v) {
    const auto& var = model.variables[v];
    if (values[v] < var.lb - tol || values[v] > var.ub + tol) return false;
    if (var.integer && std::abs(values[v] - std::round(values[v])) > tol) return false;
  }
  for (const auto& c : model.constraints) {
    double lhs = 0.0;
    for (const auto& [idx, coef] : c.terms) lhs += coef * values[idx];
    if (c.sense == Sense::le && lhs > c.rhs + tol) return false;
    if (c.sense == Sense::ge && lhs < c.rhs - tol) return false;
    if (c.sense == Sense::eq && std::abs(lhs - c.rhs) > tol) return false;
  }
  return true;
}

namespace {

HighsLp to_highs(const Model& model, bool relax) {
  HighsLp lp;
  lp.num_col_ = static_cast<HighsInt>(model.variables.size());
  lp.num_row_ = static_cast<HighsInt>(model.constraints.size());
  lp.sense_ = ObjSense::kMinimize;
  lp.offset_ = model.objective_offset;
  lp.col_cost_.assign(lp.num_col_, 0.0);
  for (size_t v = 0; v < model.objective.size(); ++v) lp.col_cost_[v] = model.objective[v];
  bool any_integer = false;
  for (const auto& v : model.variables) {
    lp.col_lower_.push_back(v.lb);
    lp.col_upper_.push_back(v.ub);
    if (!relax && v.integer) any_integer = true;
    lp.integrality_.push_back(!relax && v.integer ? HighsVarType::kInteger
                                                  : HighsVarType::kContinuous);
  }
  if (!any_integer) lp.integrality_.clear();
  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.start_.assign(1, 0);
  for (const auto& c : model.constraints) {
    switch (c.sense) {
      case Sense::le: lp.row_lower_.push_back(-kHighsInf); lp.row_upper_.push_back(c.rhs); break;
      case Sense::ge: lp.row_lower_.push_back(c.rhs); lp.row_upper_.push_back(kHighsInf); break;
      case Sense::eq: lp.row_lower_.push_back(c.rhs); lp.row_upper_.push_back(c.rhs); break;
    }
    for (const auto& [idx, coef] : c.terms) {
      lp.a_matrix_.index_.push_back(idx);
      lp.a_matrix_.value_.push_back(coef);
    }
    lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
  }
  return lp;
}

SolveOutcome run_highs(const Model& model, const SolveConfig& config, bool relax) {
  model.check_well_formed();
  if (config.time_limit <= 0.0) throw BackendError("time_limit must be > 0");

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("time_limit", config.time_limit);
  highs.setOptionValue("mip_rel_gap", config.rel_gap_tol);
  highs.setOptionValue("mip_abs_gap", config.abs_gap_tol);
  highs.setOptionValue("threads", config.threads);
  highs.setOptionValue("presolve", config.presolve ? "on" : "off");
  if (config.aggressive_heuristics) highs.setOptionValue("mip_heuristic_effort", 0.2);
  highs.setOptionValue("random_seed", 0);

  HighsLp lp = to_highs(model, relax);
  if (highs.passModel(lp) != HighsStatus::kOk) throw BackendError("model rejected by backend");

  bool is_mip = !relax && !lp.integrality_.empty();
  if (config.warmstart && is_mip) {
    if (config.warmstart->size() != model.variables.size())
      throw BackendError("warmstart must assign every variable");
    HighsSolution start;
    start.col_value = *config.warmstart;
    highs.setSolution(start);
  }

  HighsStatus rs = highs.run();
  if (rs == HighsStatus::kError) throw BackendError("backend error during solve");

  SolveOutcome out;
  const HighsInfo& info = highs.getInfo();
  out.runtime = highs.getRunTime();
  out.nodes = is_mip ? static_cast<long>(info.mip_node_count) : 0;

  bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;
  HighsModelStatus st = highs.getModelStatus();
  switch (st) {
    case HighsModelStatus::kOptimal: out.status = SolveStatus::optimal; break;
    case HighsModelStatus::kInfeasible: out.status = SolveStatus::infeasible; break;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible: out.status = SolveStatus::unbounded; break;
    default:
      out.status = has_primal ? SolveStatus::feasible_limit : SolveStatus::no_solution_limit;
      break;
  }
  if (has_primal) {
    out.values = highs.getSolution().col_value;
    out.objective = info.objective_function_value;
    out.dual_bound = is_mip ? info.mip_dual_bound : out.objective;
  } else if (out.status != SolveStatus::infeasible && out.status != SolveStatus::unbounded) {
    out.dual_bound = is_mip ? info.mip_dual_bound : -kInf;
  }

  // A reported optimum must actually close the gap.
  if (out.status == SolveStatus::optimal && is_mip) {
    double gap = std::abs(out.objective - out.dual_bound);
    if (gap > config.abs_gap_tol + config.rel_gap_tol * std::abs(out.objective) + 1e-9)
      out.status = SolveStatus::feasible_limit;
  }

  // Never return worse than a feasible warmstart.
  if (config.warmstart && is_mip && assignment_feasible(model, *config.warmstart)) {
    double ws_obj = assignment_objective(model, *config.warmstart);
    if (!out.has_solution() || out.objective > ws_obj + 1e-9) {
      out.values = *config.warmstart;
      out.objective = ws_obj;
      if (out.status != SolveStatus::feasible_limit && out.status != SolveStatus::optimal)
        out.status = SolveStatus::feasible_limit;
      if (out.status == SolveStatus::optimal) out.status = SolveStatus::feasible_limit;
    }
  }
  return out;
}

}  // namespace

SolveOutcome solve(const Model& model, const SolveConfig& config) {
  return run_highs(model, config, false);
}

SolveOutcome solve_lp_relaxation(const Model& model, const SolveConfig& config) {
  return run_highs(model, config, true);
}

namespace {

std::string sanitize(const std::string& name, std::set<std::string>& used,
                     std::map<std::string, std::string>& renamed, char fallback_prefix) {
  std::string s;
  for (char ch : name)
    s += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_';
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) s = fallback_prefix + ("_" + s);
  std::string candidate = s;
  int suffix = 1;
  while (!used.insert(candidate).second) candidate = s + "_" + std::to_string(++suffix);
  if (candidate != name) renamed[name] = candidate;
  return candidate;
}

std::string num(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream out;
    out.precision(0);
    out << std::fixed << v;
    return out.str();
  }
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

ExportResult export_model(const Model& model, ExportFormat format) {
  model.check_well_formed();
  ExportResult res;
  std::set<std::string> used;
  std::vector<std::string> vnames, cnames;
  for (const auto& v : model.variables)
    vnames.push_back(sanitize(v.name, used, res.renamed, 'v'));
  used.clear();
  for (const auto& c : model.constraints)
    cnames.push_back(sanitize(c.name, used, res.renamed, 'c'));

  // Objective constants are carried by a variable fixed at 1 so that any
  // reader reproduces the objective value exactly.
  bool has_offset = model.objective_offset != 0.0;

  std::ostringstream out;
  if (format == ExportFormat::lp) {
    out << "Minimize\n obj:";
    bool any = false;
    for (size_t v = 0; v < model.variables.size(); ++v) {
      double c = v < model.objective.size() ? model.objective[v] : 0.0;
      if (c == 0.0) continue;
      out << (c < 0 ? " - " : (any ? " + " : " ")) << num(std::abs(c)) << " " << vnames[v];
      any = true;
    }
    if (has_offset)
      out << (model.objective_offset < 0 ? " - " : (any ? " + " : " "))
          << num(std::abs(model.objective_offset)) << " fixed_one";
    if (!any && !has_offset) out << " 0 " << (vnames.empty() ? "dummy" : vnames[0]);
    out << "\nSubject To\n";
    for (size_t r = 0; r < model.constraints.size(); ++r) {
      const auto& c = model.constraints[r];
      out << " " << cnames[r] << ":";
      bool first = true;
      for (const auto& [idx, coef] : c.terms) {
        out << (coef < 0 ? " - " : (first ? " " : " + ")) << num(std::abs(coef)) << " "
            << vnames[idx];
        first = false;
      }
      if (first) out << " 0 " << (vnames.empty() ? "dummy" : vnames[0]);
      out << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ")
          << num(c.rhs) << "\n";
    }
    out << "Bounds\n";
    for (size_t v = 0; v < model.variables.size(); ++v) {
      const auto& var = model.variables[v];
      if (var.lb == 0.0 && var.ub == kInf) continue;
      if (var.lb == -kInf && var.ub == kInf) {
        out << " " << vnames[v] << " free\n";
      } else {
        out << " " << (var.lb == -kInf ? "-inf" : num(var.lb)) << " <= " << vnames[v]
            << " <= " << (var.ub == kInf ? "+inf" : num(var.ub)) << "\n";
      }
    }
    if (has_offset) out << " fixed_one = 1\n";
    bool any_int = false;
    for (const auto& var : model.variables) any_int |= var.integer;
    if (any_int) {
      out << "General\n";
      for (size_t v = 0; v < model.variables.size(); ++v)
        if (model.variables[v].integer) out << " " << vnames[v] << "\n";
    }
    out << "End\n";
  } else {
    out << "NAME          model\nROWS\n N  obj\n";
    for (size_t r = 0; r < model.constraints.size(); ++r) {
      const auto& c = model.constraints[r];
      out << " " << (c.sense == Sense::le ? "L" : c.sense == Sense::ge ? "G" : "E") << "  "
          << cnames[r] << "\n";
    }
    out << "COLUMNS\n";
    // Per-variable entries; integer runs wrapped in INTORG/INTEND markers.
    std::vector<std::vector<std::pair<size_t, double>>> col_rows(model.variables.size());
    for (size_t r = 0; r < model.constraints.size(); ++r)
      for (const auto& [idx, coef] : model.constraints[r].terms)
        col_rows[idx].emplace_back(r, coef);
    bool in_int = false;
    int marker = 0;
    for (size_t v = 0; v < model.variables.size(); ++v) {
      if (model.variables[v].integer != in_int) {
        out << "    MARKER                 'MARKER'                 '"
            << (in_int ? "INTEND" : "INTORG") << "'\n";
        in_int = !in_int;
        ++marker;
      }
      double c = v < model.objective.size() ? model.objective[v] : 0.0;
      if (c != 0.0) out << "    " << vnames[v] << "  obj  " << num(c) << "\n";
      for (const auto& [r, coef] : col_rows[v])
        out << "    " << vnames[v] << "  " << cnames[r] << "  " << num(coef) << "\n";
      if (c == 0.0 && col_rows[v].empty()) out << "    " << vnames[v] << "  obj  0\n";
    }
    if (in_int)
      out << "    MARKER                 'MARKER'                 'INTEND'\n";
    if (has_offset) out << "    fixed_one  obj  " << num(model.objective_offset) << "\n";
    out << "RHS\n";
    for (size_t r = 0; r < model.constraints.size(); ++r)
      if (model.constraints[r].rhs != 0.0)
        out << "    rhs  " << cnames[r] << "  " << num(model.constraints[r].rhs) << "\n";
    out << "BOUNDS\n";
    for (size_t v = 0; v < model.variables.size(); ++v) {
      const auto& var = model.variables[v];
      if (var.lb == -kInf && var.ub == kInf) {
        out << " FR BND  " << vnames[v] << "\n";
        continue;
      }
      if (var.lb == -kInf)
        out << " MI BND  " << vnames[v] << "\n";
      else if (var.lb != 0.0 || var.integer)
        out << " LO BND  " << vnames[v] << "  " << num(var.lb) << "\n";
      if (var.ub != kInf) out << " UP BND  " << vnames[v] << "  " << num(var.ub) << "\n";
    }
    if (has_offset) out << " FX BND  fixed_one  1\n";
    out << "ENDATA\n";
  }
  res.text = out.str();
  return res;
}

}  // namespace nucsched::milp
