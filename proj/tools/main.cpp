#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nucsched/biobjective.hpp"
#include "nucsched/instance_io.hpp"
#include "nucsched/oracle.hpp"
#include "nucsched/preprocessing.hpp"
#include "nucsched/strfmt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nucsched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitError = 2;

[[noreturn]] void fail(int code, const std::string& command, const std::string& message) {
  json err{{"error", message}, {"command", command}};
  std::cerr << err.dump() << "\n";
  std::exit(code);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

ProblemInstance load_instance(const std::string& path) {
  ProblemInstance inst = parse_instance(slurp(path));
  inst.check_valid();
  return inst;
}

std::string instance_id(const std::string& path) { return fs::path(path).stem().string(); }

// instances that went through a heuristic reduction carry a sidecar marker
std::string marker_path(const std::string& instance_path) { return instance_path + ".restricted"; }

// instance id -> best known cost
std::map<std::string, double> load_bks(const std::string& path) {
  std::map<std::string, double> bks;
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("instance", 0) == 0) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("bks line without a comma: " + line);
    bks[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return bks;
}

SequencePolicy default_policy(const ProblemInstance& inst, double time_per_solve) {
  SequencePolicy policy;
  policy.neighborhoods.push_back(NeighborhoodSpec::time_window(1, 3));
  int max_k = 0;
  for (size_t i = 0; i < inst.t2_units.size(); ++i)
    max_k = std::max(max_k, inst.num_cycles(static_cast<int>(i)));
  for (int k = 1; k <= max_k; ++k) policy.neighborhoods.push_back(NeighborhoodSpec::cycles(k, k));
  for (size_t i = 0; i < inst.t2_units.size(); ++i)
    policy.neighborhoods.push_back(NeighborhoodSpec::units({static_cast<int>(i)}));
  for (auto& n : policy.neighborhoods) n.time_limit = time_per_solve;
  return policy;
}

struct RunRecord {
  std::string instance, method, status;
  unsigned seed = 0;
  double runtime = 0.0, financial = 0.0, stability = 0.0;
  std::optional<double> gap;
  bool failed = false;       // gap above 100%
  bool restricted = false;   // heuristic preprocessing upstream

  static std::string header() {
    return "instance,method,seed,runtime,status,financial_cost,stability_cost,gap,n_f,restricted";
  }
  std::string row() const {
    auto full = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    return fmt("{},{},{},{},{},{},{},{},{},{}", instance, method, seed, full(runtime), status,
               full(financial), full(stability), gap ? full(*gap) : "", failed ? 1 : 0,
               restricted ? 1 : 0);
  }
};

void append_record(const std::string& path, const RunRecord& rec) {
  bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw DomainError("cannot write " + path);
  if (fresh) out << RunRecord::header() << "\n";
  out << rec.row() << "\n";
}

struct ParsedRun {
  std::string method;
  double financial = 0.0;
  std::optional<double> gap;
  std::string instance;
  bool restricted = false;
  bool clean = false;
};

std::vector<ParsedRun> load_runs(const std::string& dir) {
  std::vector<ParsedRun> runs;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);   // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, ',')) cols.push_back(col);
      if (cols.size() < 10) throw DomainError(fmt("run row with {} columns in {}", cols.size(),
                                                  file.string()));
      ParsedRun r;
      r.instance = cols[0];
      r.method = cols[1];
      r.clean = cols[4] == "feasible";
      r.financial = std::stod(cols[5]);
      if (!cols[7].empty()) r.gap = std::stod(cols[7]);
      r.restricted = cols[9] == "1";
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

int cmd_generate(const std::string& out, const GeneratorConfig& cfg) {
  ProblemInstance inst = generate(cfg);
  spit(out, write_instance(inst));
  return kExitOk;
}

int cmd_derive(const std::string& in, const std::string& out, std::optional<int> ext,
               const std::string& truncate) {
  ProblemInstance inst = load_instance(in);
  DerivationSpec spec;
  if (ext) {
    spec.kind = DerivationSpec::Kind::ext;
    spec.k0 = *ext;
  } else {
    spec.kind = DerivationSpec::Kind::truncate;
    auto comma = truncate.find(',');
    if (comma == std::string::npos) throw DomainError("--truncate expects K,W");
    spec.k_keep = std::stoi(truncate.substr(0, comma));
    spec.w_keep = std::stoi(truncate.substr(comma + 1));
  }
  spit(out, write_instance(derive(inst, spec)));
  return kExitOk;
}

int cmd_preprocess(const std::string& in, const std::string& out, const std::string& report_path,
                   bool exact, std::optional<int> max_cycle_len, bool lp_fix) {
  ProblemInstance inst = load_instance(in);
  std::string report_csv;
  bool heuristic = false;

  if (exact) {
    auto [next, report] = tighten_exact(inst);
    report_csv += report.to_csv();
    if (report.infeasible) {
      if (!report_path.empty()) spit(report_path, report_csv);
      fail(kExitInfeasible, "preprocess", "instance proven infeasible: " + report.infeasible_where);
    }
    inst = std::move(next);
  }
  if (max_cycle_len) {
    auto [next, report] = tighten_max_cycle_length(inst, *max_cycle_len);
    report_csv += report.to_csv();
    heuristic = true;
    inst = std::move(next);
  }
  if (lp_fix) {
    auto [model, vm] = build_compact(inst);
    milp::SolveOutcome lp = milp::solve_lp_relaxation(model, {});
    if (!lp.has_solution()) throw DomainError("relaxation failed; cannot fix from it");
    auto [next, report] = fix_from_lp(inst, vm, lp.values);
    report_csv += report.to_csv();
    heuristic = true;
    inst = std::move(next);
  }

  spit(out, write_instance(inst));
  if (heuristic)
    spit(marker_path(out), "heuristic window reduction applied; optima may be cut\n");
  else if (fs::exists(marker_path(out)))
    fs::remove(marker_path(out));
  if (!report_path.empty()) spit(report_path, report_csv);
  return kExitOk;
}

struct SolveArgs {
  std::string in, out, method = "milp", warmstart_path, trace_path, record_path, bks_path;
  std::string ct6 = "off";
  double time_limit = 300.0;
  double gap = 1e-4;
  unsigned seed = 0;
};

int cmd_solve(const SolveArgs& args) {
  ProblemInstance inst = load_instance(args.in);
  auto t0 = std::chrono::steady_clock::now();

  ConstructiveConfig ctor_cfg;
  ctor_cfg.time_limit = args.time_limit;
  ctor_cfg.gap_tol = args.gap;

  std::optional<Solution> warm;
  if (!args.warmstart_path.empty())
    warm = parse_solution(slurp(args.warmstart_path), inst);

  Solution sol;
  DescentTrace trace;
  bool have_trace = false;

  auto run_vnd = [&](const Solution& initial, double budget) {
    SequencePolicy policy = default_policy(inst, std::min(10.0, budget / 4.0));
    VndConfig cfg;
    cfg.total_time_limit = budget;
    auto [best, tr] = vnd(inst, initial, policy, cfg);
    trace = std::move(tr);
    have_trace = true;
    return best;
  };

  if (args.method == "milp") {
    FormulationOptions opts;
    opts.ct6 = args.ct6 == "light" ? Ct6Mode::light_disaggregated : Ct6Mode::off;
    auto [model, vm] = build_compact(inst, opts);
    milp::SolveConfig cfg;
    cfg.time_limit = args.time_limit;
    cfg.rel_gap_tol = args.gap;
    if (warm) {
      std::vector<double> ws = warmstart_assignment(model, vm, *warm, inst);
      if (milp::assignment_feasible(model, ws)) cfg.warmstart = ws;
    }
    milp::SolveOutcome out = milp::solve(model, cfg);
    if (!out.has_solution())
      fail(out.status == milp::SolveStatus::infeasible ? kExitInfeasible : kExitError, "solve",
           "model has no solution");
    sol = extract_solution(out, vm, inst);
  } else if (args.method == "simplified") {
    sol = solve_simplified(inst, ctor_cfg);
  } else if (args.method == "rrf") {
    sol = solve_rrf(inst, ctor_cfg);
  } else if (args.method == "cmsa") {
    sol = solve_cmsa(inst, ctor_cfg);
  } else if (args.method == "vnd") {
    Solution initial = warm ? *warm : solve_cmsa(inst, ctor_cfg);
    sol = run_vnd(initial, args.time_limit);
  } else if (args.method == "pipeline") {
    ConstructiveConfig half = ctor_cfg;
    half.time_limit = args.time_limit / 2.0;
    Solution initial = solve_cmsa(inst, half);
    sol = run_vnd(initial, args.time_limit / 2.0);
  } else {
    throw DomainError("unknown method " + args.method);
  }

  double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  spit(args.out, write_solution(sol, inst));
  if (!args.trace_path.empty() && have_trace) spit(args.trace_path, trace.to_csv());

  if (!args.record_path.empty()) {
    RunRecord rec;
    rec.instance = instance_id(args.in);
    rec.method = args.method;
    rec.seed = args.seed;
    rec.runtime = runtime;
    rec.status = sol.feasible() ? "feasible" : "violations";
    rec.financial = sol.cost.financial();
    rec.stability = sol.cost.stability;
    rec.restricted = fs::exists(marker_path(args.in));
    if (!args.bks_path.empty()) {
      auto bks = load_bks(args.bks_path);
      auto it = bks.find(rec.instance);
      if (it != bks.end()) {
        rec.gap = gap(rec.financial, it->second);
        rec.failed = *rec.gap > 1.0;
      }
    }
    append_record(args.record_path, rec);
  }

  if (!sol.feasible()) {
    json err{{"error", "solution violates constraints"}, {"command", "solve"},
             {"violations", sol.violations.size()}};
    std::cerr << err.dump() << "\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_pareto(const std::string& in, const std::string& out, const std::string& baseline_path,
               int n_max) {
  ProblemInstance inst = load_instance(in);
  Solution baseline = parse_solution(slurp(baseline_path), inst);
  auto frontier = pareto_frontier(inst, baseline.schedule, n_max);
  spit(out, frontier_csv(frontier));
  return kExitOk;
}

int cmd_oracle(const std::string& in, const std::string& out) {
  ProblemInstance inst = load_instance(in);
  OracleResult res = enumerate_optimal(inst);
  if (!res.found) fail(kExitInfeasible, "oracle", "no feasible schedule exists");
  spit(out, write_solution(res.best, inst));
  json summary{{"n_candidates", res.n_candidates},
               {"n_feasible", res.n_feasible},
               {"financial_cost", res.best.cost.financial()}};
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& in, const std::string& solution_path) {
  ProblemInstance inst = load_instance(in);
  Solution sol = parse_solution(slurp(solution_path), inst);
  json violations = json::array();
  for (const auto& v : sol.violations)
    violations.push_back({{"constraint", v.constraint}, {"where", v.where},
                          {"magnitude", v.magnitude}});
  json out{{"refuel_cost", sol.cost.refuel_cost},
           {"t1_cost", sol.cost.t1_cost},
           {"final_fuel_credit", sol.cost.final_fuel_credit},
           {"financial_cost", sol.cost.financial()},
           {"stability_cost", sol.cost.stability},
           {"violations", violations}};
  std::cout << out.dump(2) << "\n";
  return sol.feasible() ? kExitOk : kExitInfeasible;
}

int cmd_report(const std::string& runs_dir, const std::string& bks_path,
               const std::string& thresholds_arg, const std::string& out_csv) {
  std::vector<double> thresholds;
  std::stringstream ss(thresholds_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) thresholds.push_back(std::stod(tok));
  if (thresholds.empty()) throw DomainError("no thresholds given");

  std::map<std::string, double> bks = bks_path.empty() ? std::map<std::string, double>{}
                                                       : load_bks(bks_path);
  std::vector<ParsedRun> runs = load_runs(runs_dir);
  if (runs.empty()) throw DomainError("no runs found in " + runs_dir);

  // group by method; heuristic-restricted runs are reported separately
  std::map<std::string, std::vector<double>> groups;
  std::map<std::string, int> dirty;
  for (const auto& r : runs) {
    std::string key = r.method + (r.restricted ? " [restricted]" : "");
    if (!r.clean) {
      ++dirty[key];
      continue;
    }
    double g;
    if (r.gap) {
      g = *r.gap;
    } else {
      auto it = bks.find(r.instance);
      if (it == bks.end()) continue;
      g = gap(r.financial, it->second);
    }
    groups[key].push_back(g);
    dirty.try_emplace(key, 0);
  }
  if (groups.empty()) throw DomainError("no run matches an entry of the reference costs");

  std::string csv = "method,mean,stddev,q1,q2,q3";
  for (double t : thresholds) csv += fmt(",n_below_{}", t);
  csv += ",n_failures,n_valid,n_unsolved\n";
  std::string text = fmt("{}  mean        stddev      q1          q2          q3\n",
                         "method                    ");
  for (const auto& [key, gaps] : groups) {
    GapStats st = aggregate_stats(gaps, thresholds);
    csv += fmt("{},{},{},{},{},{}", key, st.mean, st.stddev, st.q1, st.q2, st.q3);
    for (const auto& [t, n] : st.n_below) csv += fmt(",{}", n);
    csv += fmt(",{},{},{}\n", st.n_failures, st.n_valid, dirty[key]);

    std::string name = key;
    name.resize(26, ' ');
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s  %-10.6f  %-10.6f  %-10.6f  %-10.6f  %-10.6f\n",
                  name.c_str(), st.mean, st.stddev, st.q1, st.q2, st.q3);
    text += buf;
  }
  std::cout << text;
  if (!out_csv.empty()) spit(out_csv, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver toolkit for joint refueling-and-maintenance planning"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "build a synthetic instance");
  GeneratorConfig gen_cfg;
  std::string gen_out;
  gen->add_option("--seed", gen_cfg.seed);
  gen->add_option("--t2", gen_cfg.n_t2);
  gen->add_option("--t1", gen_cfg.n_t1);
  gen->add_option("--cycles", gen_cfg.n_cycles);
  gen->add_option("--weeks", gen_cfg.weeks);
  gen->add_option("--tw-width", gen_cfg.tw_width);
  gen->add_option("--resources", gen_cfg.n_resource_constraints);
  gen->add_flag("--optional-tail", gen_cfg.optional_tail);
  gen->add_option("--out", gen_out)->required();

  // derive
  auto* der = app.add_subcommand("derive", "derive a widened or truncated instance");
  std::string der_in, der_out, der_truncate;
  std::optional<int> der_ext;
  der->add_option("--in", der_in)->required();
  der->add_option("--out", der_out)->required();
  auto* ext_opt = der->add_option("--ext", der_ext, "remove windows beyond cycle K0");
  der->add_option("--truncate", der_truncate, "keep K cycles and W weeks, as K,W")
      ->excludes(ext_opt);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "shrink outage windows");
  std::string pre_in, pre_out, pre_report;
  bool pre_exact = false, pre_lp_fix = false;
  std::optional<int> pre_max_len;
  pre->add_option("--in", pre_in)->required();
  pre->add_option("--out", pre_out)->required();
  pre->add_option("--report", pre_report);
  pre->add_flag("--exact", pre_exact);
  pre->add_option("--max-cycle-len", pre_max_len);
  pre->add_flag("--lp-fix", pre_lp_fix);

  // solve
  auto* sol = app.add_subcommand("solve", "find a plan");
  SolveArgs sol_args;
  sol->add_option("--in", sol_args.in)->required();
  sol->add_option("--out", sol_args.out)->required();
  sol->add_option("--method", sol_args.method)
      ->check(CLI::IsMember({"milp", "simplified", "rrf", "cmsa", "vnd", "pipeline"}));
  sol->add_option("--time-limit", sol_args.time_limit);
  sol->add_option("--gap", sol_args.gap);
  sol->add_option("--seed", sol_args.seed);
  sol->add_option("--warmstart", sol_args.warmstart_path);
  sol->add_option("--ct6", sol_args.ct6)->check(CLI::IsMember({"off", "light"}));
  sol->add_option("--trace", sol_args.trace_path);
  sol->add_option("--record", sol_args.record_path, "append a run record CSV row");
  sol->add_option("--bks", sol_args.bks_path, "reference costs for the run record gap");

  // pareto
  auto* par = app.add_subcommand("pareto", "cost/stability frontier");
  std::string par_in, par_out, par_baseline;
  int par_nmax = 0;
  par->add_option("--in", par_in)->required();
  par->add_option("--out", par_out)->required();
  par->add_option("--baseline", par_baseline)->required();
  par->add_option("--nmax", par_nmax)->required();

  // oracle
  auto* ora = app.add_subcommand("oracle", "exhaustive ground truth on tiny instances");
  std::string ora_in, ora_out;
  ora->add_option("--in", ora_in)->required();
  ora->add_option("--out", ora_out)->required();

  // evaluate
  auto* eva = app.add_subcommand("evaluate", "validate and price a solution file");
  std::string eva_in, eva_solution;
  eva->add_option("--in", eva_in)->required();
  eva->add_option("--solution", eva_solution)->required();

  // report
  auto* rep = app.add_subcommand("report", "aggregate gap statistics over run records");
  std::string rep_runs, rep_bks, rep_out, rep_thresholds = "0.0001,0.0005,0.01";
  rep->add_option("--runs", rep_runs)->required();
  rep->add_option("--bks", rep_bks);
  rep->add_option("--thresholds", rep_thresholds);
  rep->add_option("--out", rep_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_out, gen_cfg);
    if (der->parsed()) {
      if (!der_ext && der_truncate.empty())
        throw DomainError("derive needs --ext or --truncate");
      return cmd_derive(der_in, der_out, der_ext, der_truncate);
    }
    if (pre->parsed()) return cmd_preprocess(pre_in, pre_out, pre_report, pre_exact,
                                             pre_max_len, pre_lp_fix);
    if (sol->parsed()) return cmd_solve(sol_args);
    if (par->parsed()) return cmd_pareto(par_in, par_out, par_baseline, par_nmax);
    if (ora->parsed()) return cmd_oracle(ora_in, ora_out);
    if (eva->parsed()) return cmd_evaluate(eva_in, eva_solution);
    if (rep->parsed()) return cmd_report(rep_runs, rep_bks, rep_thresholds, rep_out);
  } catch (const std::exception& e) {
    fail(kExitError, app.get_subcommands().front()->get_name(), e.what());
  }
  return kExitError;
}
