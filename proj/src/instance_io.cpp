#include "nucsched/instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "nucsched/strfmt.hpp"

namespace nucsched {

using nlohmann::json;

namespace {

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw DomainError(path.empty() ? key + ": missing field"
                                   : path + "." + key + ": missing field");
  return j.at(key);
}

double number_at(const json& j, const std::string& key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_number()) throw DomainError(path + "." + key + ": expected a number");
  return v.get<double>();
}

int int_at(const json& j, const std::string& key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_number_integer()) throw DomainError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

std::vector<double> vector_at(const json& j, const std::string& key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_array()) throw DomainError(path + "." + key + ": expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw DomainError(path + "." + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::pair<int, int> parse_pair_key(const std::string& key, const std::string& path) {
  size_t comma = key.find(',');
  if (comma == std::string::npos)
    throw DomainError(path + ": key '" + key + "' must be 'unit,cycle'");
  try {
    return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
  } catch (const std::exception&) {
    throw DomainError(path + ": key '" + key + "' must hold integers");
  }
}

}  // namespace

ProblemInstance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(fmt("syntax error at byte {}: {}", e.byte, e.what()));
  }

  ProblemInstance inst;
  inst.weeks = int_at(j, "weeks", "");
  inst.demand = vector_at(j, "demand", "");
  inst.fuel_factor = vector_at(j, "fuel_factor", "");

  for (const auto& ju : member(j, "t1_units", "")) {
    T1Unit u;
    u.id = member(ju, "id", "t1_units").get<std::string>();
    std::string path = "t1_units[" + u.id + "]";
    u.p_min = vector_at(ju, "p_min", path);
    u.p_max = vector_at(ju, "p_max", path);
    u.cost = vector_at(ju, "cost", path);
    inst.t1_units.push_back(std::move(u));
  }

  for (const auto& ju : member(j, "t2_units", "")) {
    T2Unit u;
    u.id = member(ju, "id", "t2_units").get<std::string>();
    std::string path = "t2_units[" + u.id + "]";
    u.p_max = vector_at(ju, "p_max", path);
    u.initial_fuel = number_at(ju, "initial_fuel", path);
    u.initial_bore_null = number_at(ju, "initial_bore_null", path);
    u.final_fuel_credit = number_at(ju, "final_fuel_credit", path);
    int k = 0;
    for (const auto& jc : member(ju, "cycles", path)) {
      std::string cp = fmt("{}.cycles[{}]", path, ++k);
      CycleSpec c;
      c.duration = int_at(jc, "duration", cp);
      c.earliest = int_at(jc, "earliest", cp);
      c.latest = int_at(jc, "latest", cp);
      c.refuel_min = number_at(jc, "refuel_min", cp);
      c.refuel_max = number_at(jc, "refuel_max", cp);
      c.refuel_cost = number_at(jc, "refuel_cost", cp);
      c.loss_factor = number_at(jc, "loss_factor", cp);
      c.bore_null = number_at(jc, "bore_null", cp);
      c.stock_max = number_at(jc, "stock_max", cp);
      c.stock_max_before_outage = number_at(jc, "stock_max_before_outage", cp);
      if (jc.contains("baseline_week") && !jc.at("baseline_week").is_null())
        c.baseline_week = int_at(jc, "baseline_week", cp);
      if (jc.contains("stability_weights"))
        c.stability_weights = vector_at(jc, "stability_weights", cp);
      if (jc.contains("stretch_profile") && !jc.at("stretch_profile").is_null()) {
        StretchProfile sp;
        for (const auto& pt : jc.at("stretch_profile")) {
          if (!pt.is_array() || pt.size() != 2)
            throw DomainError(cp + ".stretch_profile: expected [fuel, coefficient] pairs");
          sp.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        }
        c.stretch_profile = std::move(sp);
      }
      u.cycles.push_back(std::move(c));
    }
    inst.t2_units.push_back(std::move(u));
  }

  if (j.contains("scheduling_constraints")) {
    for (const auto& jc : j.at("scheduling_constraints")) {
      ResourceConstraint rc;
      rc.id = member(jc, "id", "scheduling_constraints").get<std::string>();
      std::string path = "scheduling_constraints[" + rc.id + "]";
      for (const auto& m : member(jc, "members", path)) {
        if (!m.is_array() || m.size() != 2)
          throw DomainError(path + ".members: expected [unit, cycle] pairs");
        rc.members.push_back({m[0].get<int>(), m[1].get<int>()});
      }
      for (const auto& w : member(jc, "weeks", path)) rc.weeks.push_back(w.get<int>());
      rc.cumulative.assign(rc.members.size(), std::vector<double>(inst.weeks, 0.0));
      for (const auto& [key, val] : member(jc, "consumption", path).items()) {
        size_t c1 = key.find(','), c2 = key.rfind(',');
        if (c1 == std::string::npos || c2 == c1)
          throw DomainError(path + ".consumption: key '" + key + "' must be 'unit,cycle,week'");
        int unit, cycle, week;
        try {
          unit = std::stoi(key.substr(0, c1));
          cycle = std::stoi(key.substr(c1 + 1, c2 - c1 - 1));
          week = std::stoi(key.substr(c2 + 1));
        } catch (const std::exception&) {
          throw DomainError(path + ".consumption: key '" + key + "' must hold integers");
        }
        auto it = std::find(rc.members.begin(), rc.members.end(), OutageRef{unit, cycle});
        if (it == rc.members.end())
          throw DomainError(path + ".consumption: key '" + key + "' names a non-member");
        if (week < 1 || week > inst.weeks)
          throw DomainError(path + ".consumption: key '" + key + "' week out of range");
        rc.cumulative[it - rc.members.begin()][week - 1] = val.get<double>();
      }
      for (const auto& [key, val] : member(jc, "capacity", path).items()) {
        try {
          rc.capacity[std::stoi(key)] = val.get<double>();
        } catch (const std::exception&) {
          throw DomainError(path + ".capacity: key '" + key + "' must be a week number");
        }
      }
      inst.scheduling_constraints.push_back(std::move(rc));
    }
  }

  inst.check_valid();
  return inst;
}

std::string write_instance(const ProblemInstance& inst) {
  json j;
  j["weeks"] = inst.weeks;
  j["demand"] = inst.demand;
  j["fuel_factor"] = inst.fuel_factor;
  j["t1_units"] = json::array();
  for (const auto& u : inst.t1_units)
    j["t1_units"].push_back(
        {{"id", u.id}, {"p_min", u.p_min}, {"p_max", u.p_max}, {"cost", u.cost}});
  j["t2_units"] = json::array();
  for (const auto& u : inst.t2_units) {
    json ju = {{"id", u.id},
               {"p_max", u.p_max},
               {"initial_fuel", u.initial_fuel},
               {"initial_bore_null", u.initial_bore_null},
               {"final_fuel_credit", u.final_fuel_credit}};
    ju["cycles"] = json::array();
    for (const auto& c : u.cycles) {
      json jc = {{"duration", c.duration},
                 {"earliest", c.earliest},
                 {"latest", c.latest},
                 {"refuel_min", c.refuel_min},
                 {"refuel_max", c.refuel_max},
                 {"refuel_cost", c.refuel_cost},
                 {"loss_factor", c.loss_factor},
                 {"bore_null", c.bore_null},
                 {"stock_max", c.stock_max},
                 {"stock_max_before_outage", c.stock_max_before_outage}};
      if (c.baseline_week) jc["baseline_week"] = *c.baseline_week;
      if (!c.stability_weights.empty()) jc["stability_weights"] = c.stability_weights;
      if (c.stretch_profile) {
        json pts = json::array();
        for (const auto& [f, coef] : c.stretch_profile->points)
          pts.push_back(json::array({f, coef}));
        jc["stretch_profile"] = pts;
      }
      ju["cycles"].push_back(std::move(jc));
    }
    j["t2_units"].push_back(std::move(ju));
  }
  if (!inst.scheduling_constraints.empty()) {
    j["scheduling_constraints"] = json::array();
    for (const auto& rc : inst.scheduling_constraints) {
      json jc = {{"id", rc.id}};
      jc["members"] = json::array();
      for (const auto& m : rc.members) jc["members"].push_back(json::array({m.unit, m.cycle}));
      jc["weeks"] = rc.weeks;
      json cons = json::object();
      for (size_t a = 0; a < rc.members.size(); ++a)
        for (int w = 1; w <= inst.weeks; ++w)
          if (rc.cumulative[a][w - 1] != 0.0)
            cons[fmt("{},{},{}", rc.members[a].unit, rc.members[a].cycle, w)] =
                rc.cumulative[a][w - 1];
      jc["consumption"] = std::move(cons);
      json cap = json::object();
      for (const auto& [w, c] : rc.capacity) cap[std::to_string(w)] = c;
      jc["capacity"] = std::move(cap);
      j["scheduling_constraints"].push_back(std::move(jc));
    }
  }
  return j.dump(2) + "\n";
}

std::string write_solution(const Solution& sol, const ProblemInstance& inst) {
  json j;
  json sched = json::object();
  for (size_t i = 0; i < sol.schedule.week_of.size(); ++i)
    for (size_t k = 0; k < sol.schedule.week_of[i].size(); ++k) {
      const auto& w = sol.schedule.week_of[i][k];
      sched[fmt("{},{}", i, k + 1)] = w ? json(*w) : json(nullptr);
    }
  j["schedule"] = std::move(sched);
  j["refuel"] = sol.dispatch.refuel;
  j["t1_production"] = sol.dispatch.t1_production;
  j["t2_production"] = sol.dispatch.t2_production;
  j["costs"] = {{"refuel_cost", sol.cost.refuel_cost},
                {"t1_cost", sol.cost.t1_cost},
                {"final_fuel_credit", sol.cost.final_fuel_credit},
                {"stability", sol.cost.stability},
                {"penalty_slack", sol.cost.penalty_slack},
                {"total_financial", sol.cost.financial()}};
  (void)inst;
  return j.dump(2) + "\n";
}

Solution parse_solution(const std::string& text, const ProblemInstance& inst) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(fmt("syntax error at byte {}: {}", e.byte, e.what()));
  }
  Solution sol;
  sol.schedule = OutageSchedule::empty(inst);
  for (const auto& [key, val] : member(j, "schedule", "").items()) {
    auto [i, k] = parse_pair_key(key, "schedule");
    if (i < 0 || i >= static_cast<int>(inst.t2_units.size()) || k < 1 || k > inst.num_cycles(i))
      throw DomainError("schedule: key '" + key + "' out of range");
    if (!val.is_null()) sol.schedule.week_of[i][k - 1] = val.get<int>();
  }
  sol.dispatch = DispatchPlan::zeros(inst);
  sol.dispatch.refuel = member(j, "refuel", "").get<std::vector<std::vector<double>>>();
  sol.dispatch.t1_production =
      member(j, "t1_production", "").get<std::vector<std::vector<double>>>();
  sol.dispatch.t2_production =
      member(j, "t2_production", "").get<std::vector<std::vector<std::vector<double>>>>();

  auto sim = simulate_fuel(sol.schedule, sol.dispatch.refuel, sol.dispatch.t2_production, inst);
  for (size_t i = 0; i < inst.t2_units.size(); ++i) {
    for (size_t k = 0; k < sim.fuel_start[i].size(); ++k) {
      sol.dispatch.fuel_start[i][k] = sim.fuel_start[i][k];
      sol.dispatch.fuel_end[i][k] = sim.fuel_end[i][k];
    }
    sol.dispatch.horizon_fuel[i] = sim.horizon_fuel[i];
  }
  if (j.contains("costs")) {
    const auto& jc = j.at("costs");
    sol.cost.refuel_cost = number_at(jc, "refuel_cost", "costs");
    sol.cost.t1_cost = number_at(jc, "t1_cost", "costs");
    sol.cost.final_fuel_credit = number_at(jc, "final_fuel_credit", "costs");
    sol.cost.stability = number_at(jc, "stability", "costs");
    sol.cost.penalty_slack = number_at(jc, "penalty_slack", "costs");
  }
  sol.violations = validate(sol, inst);
  return sol;
}

ProblemInstance generate(const GeneratorConfig& cfg) {
  if (cfg.n_t2 < 1 || cfg.n_t1 < 1 || cfg.n_cycles < 1 || cfg.weeks < 1)
    throw DomainError("generator config: all counts must be >= 1");
  if (cfg.tw_width < 0) throw DomainError("generator config: tw_width must be >= 0");
  if (cfg.n_resource_constraints < 0)
    throw DomainError("generator config: n_resource_constraints must be >= 0");

  const int W = cfg.weeks, K = cfg.n_cycles;
  const int duration = 3;
  const int slot = (W - duration) / K;
  if (slot < duration + 2)
    throw DomainError(
        fmt("generator config: horizon too short for {} cycles of duration {} in {} weeks", K,
            duration, W));

  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> unit_dist(0.0, 1.0);

  const double p_bar = 100.0;
  const double rho = 0.6;      // reference load factor of nuclear campaigns
  const double q = 0.9;
  const double bore = 5.0;
  const double margin = 20.0;  // target residual fuel at each cycle end

  ProblemInstance inst;
  inst.weeks = W;
  inst.fuel_factor.assign(W, 1.0);

  // Reference schedule: outages of unit i staggered inside K equal slots.
  std::vector<std::vector<int>> ref(cfg.n_t2, std::vector<int>(K));
  for (int i = 0; i < cfg.n_t2; ++i) {
    int off = cfg.n_t2 > 1 ? (i * (slot - duration)) / cfg.n_t2 : 0;
    for (int k = 0; k < K; ++k) ref[i][k] = 1 + off + k * slot;
  }

  // Nuclear units with refuels sized so every cycle ends at `margin` fuel.
  std::vector<std::vector<double>> ref_refuel(cfg.n_t2, std::vector<double>(K + 1, 0.0));
  for (int i = 0; i < cfg.n_t2; ++i) {
    T2Unit u;
    u.id = "n" + std::to_string(i + 1);
    u.p_max.assign(W, p_bar);
    u.initial_bore_null = bore;
    u.final_fuel_credit = 0.5;
    double len0 = ref[i][0] - 1;
    u.initial_fuel = margin + rho * p_bar * len0;
    for (int k = 1; k <= K; ++k) {
      int camp_from = ref[i][k - 1] + duration;
      int camp_to = k < K ? ref[i][k] - 1 : W;
      double consumption = rho * p_bar * std::max(0, camp_to - camp_from + 1);
      double refuel = margin + consumption - bore - (q - 1.0) / q * (margin - bore);
      ref_refuel[i][k] = refuel;
      CycleSpec c;
      c.duration = duration;
      c.earliest = std::max(1, ref[i][k - 1] - cfg.tw_width);
      c.latest = std::min(ref[i][k - 1] + cfg.tw_width, W);
      if (cfg.optional_tail && k == K) c.latest = W + 1;
      c.refuel_min = 0.8 * refuel;
      c.refuel_max = 1.2 * refuel;
      c.refuel_cost = 1.0 + cfg.cost_spread * unit_dist(rng);
      c.loss_factor = q;
      c.bore_null = bore;
      c.stock_max = 1.3 * (margin + consumption);
      c.stock_max_before_outage = std::min(2.0 * margin, c.stock_max);
      c.baseline_week = ref[i][k - 1];
      u.cycles.push_back(std::move(c));
    }
    inst.t2_units.push_back(std::move(u));
  }

  // Reference nuclear output per week, used to size demand and T1 capacity.
  std::vector<double> nuclear_ref(W, 0.0);
  for (int i = 0; i < cfg.n_t2; ++i)
    for (int w = 1; w <= W; ++w) {
      bool in_outage = false;
      for (int k = 0; k < K; ++k)
        if (w >= ref[i][k] && w < ref[i][k] + duration) in_outage = true;
      if (!in_outage) nuclear_ref[w - 1] = nuclear_ref[w - 1] + rho * p_bar;
    }

  double cap_total = p_bar * cfg.n_t2;
  inst.demand.resize(W);
  for (int w = 1; w <= W; ++w) {
    double season = 1.0 + cfg.demand_amplitude * std::cos(2.0 * M_PI * (w - 1) / 52.0);
    double noise = 0.02 * (2.0 * unit_dist(rng) - 1.0);
    double d = cap_total * cfg.demand_base * season * (1.0 + noise);
    inst.demand[w - 1] = std::max(d, nuclear_ref[w - 1] + 1.0);
  }
  double demand_max = *std::max_element(inst.demand.begin(), inst.demand.end());

  for (int jx = 0; jx < cfg.n_t1; ++jx) {
    T1Unit u;
    u.id = "t" + std::to_string(jx + 1);
    u.p_min.assign(W, 0.0);
    u.p_max.assign(W, 1.1 * demand_max / cfg.n_t1);
    double base_cost = 2.0 + unit_dist(rng);
    u.cost.resize(W);
    for (int w = 1; w <= W; ++w)
      u.cost[w - 1] = base_cost * (1.0 + 0.2 * std::cos(2.0 * M_PI * (w - 1) / 52.0));
    inst.t1_units.push_back(std::move(u));
  }

  // Resource constraints sized from the reference schedule (slack of one unit
  // so single moves to earlier weeks stay possible).
  for (int r = 0; r < cfg.n_resource_constraints; ++r) {
    ResourceConstraint rc;
    rc.id = "r" + std::to_string(r + 1);
    for (int i = 0; i < cfg.n_t2; ++i)
      for (int k = 1; k <= K; ++k)
        if ((i + k) % cfg.n_resource_constraints == r) rc.members.push_back({i, k});
    if (rc.members.empty()) rc.members.push_back({0, 1});
    for (int w = 1; w <= W; ++w) rc.weeks.push_back(w);
    rc.cumulative.assign(rc.members.size(), std::vector<double>(W, 0.0));
    for (size_t a = 0; a < rc.members.size(); ++a)
      for (int w = 1; w <= W; ++w) rc.cumulative[a][w - 1] = w;
    for (int w = 1; w <= W; ++w) {
      int begun = 0;
      for (const auto& m : rc.members)
        if (ref[m.unit][m.cycle - 1] <= w) ++begun;
      rc.capacity[w] = begun + 1.0;
    }
    inst.scheduling_constraints.push_back(std::move(rc));
  }

  inst.check_valid();
  return inst;
}

ProblemInstance derive(const ProblemInstance& instance, const DerivationSpec& spec) {
  ProblemInstance out = instance;
  if (spec.kind == DerivationSpec::Kind::ext) {
    if (spec.k0 < 0) throw DomainError("derive: ext index must be >= 0");
    for (size_t i = 0; i < out.t2_units.size(); ++i) {
      auto& u = out.t2_units[i];
      double max_burn = 0.0;
      for (int w = 1; w <= out.weeks; ++w)
        max_burn = std::max(max_burn, out.fuel_factor[w - 1] * u.p_max[w - 1]);
      for (int k = spec.k0 + 1; k <= static_cast<int>(u.cycles.size()); ++k) {
        auto& c = u.cycles[k - 1];
        const auto& prev = u.cycles[k - 2];
        // Lowest possible fuel at the start of campaign k-1, then the weeks
        // needed to burn down to the anticipation threshold of outage k.
        double prev_anticipation = prev.stock_max_before_outage;
        if (k == 2) prev_anticipation = std::min(prev_anticipation, u.initial_fuel);
        double prev_bore = k >= 3 ? u.cycles[k - 3].bore_null : u.initial_bore_null;
        double start_min = prev.bore_null + prev.refuel_min +
                           (prev.loss_factor - 1.0) / prev.loss_factor *
                               (prev_anticipation - prev_bore);
        int burn_weeks = 0;
        if (max_burn > 0.0 && start_min > c.stock_max_before_outage)
          burn_weeks = static_cast<int>(
              std::ceil((start_min - c.stock_max_before_outage) / max_burn - 1e-9));
        c.earliest = u.cycles[k - 2].earliest + prev.duration + burn_weeks;
        c.latest = out.weeks + 1;
      }
    }
  } else {
    if (spec.k_keep < 1 || spec.w_keep < 1 || spec.w_keep > instance.weeks)
      throw DomainError("derive: truncate bounds out of range");
    int Wk = spec.w_keep;
    out.weeks = Wk;
    out.demand.resize(Wk);
    out.fuel_factor.resize(Wk);
    for (auto& u : out.t1_units) {
      u.p_min.resize(Wk);
      u.p_max.resize(Wk);
      u.cost.resize(Wk);
    }
    for (auto& u : out.t2_units) {
      u.p_max.resize(Wk);
      if (static_cast<int>(u.cycles.size()) > spec.k_keep) u.cycles.resize(spec.k_keep);
      for (auto& c : u.cycles) {
        if (c.latest > Wk) c.latest = Wk + 1;
        if (c.earliest > c.latest) c.earliest = c.latest;
        if (c.baseline_week && *c.baseline_week > Wk) c.baseline_week.reset();
        if (!c.stability_weights.empty()) c.stability_weights.resize(Wk);
      }
    }
    std::vector<ResourceConstraint> kept;
    for (auto& rc : out.scheduling_constraints) {
      ResourceConstraint nrc;
      nrc.id = rc.id;
      for (size_t a = 0; a < rc.members.size(); ++a) {
        const auto& m = rc.members[a];
        if (m.cycle <= out.num_cycles(m.unit)) {
          nrc.members.push_back(m);
          auto prof = rc.cumulative[a];
          prof.resize(Wk);
          nrc.cumulative.push_back(std::move(prof));
        }
      }
      for (int w : rc.weeks)
        if (w <= Wk) nrc.weeks.push_back(w);
      for (const auto& [w, cap] : rc.capacity)
        if (w <= Wk) nrc.capacity[w] = cap;
      if (!nrc.members.empty() && !nrc.weeks.empty()) kept.push_back(std::move(nrc));
    }
    out.scheduling_constraints = std::move(kept);
  }
  out.check_valid();
  return out;
}

long count_free_binaries(const ProblemInstance& instance) {
  long total = 0;
  for (size_t i = 0; i < instance.t2_units.size(); ++i)
    for (int k = 1; k <= instance.num_cycles(static_cast<int>(i)); ++k) {
      const auto& c = instance.cycle(static_cast<int>(i), k);
      if (instance.outage_mandatory(static_cast<int>(i), k))
        total += c.latest - c.earliest;
      else
        total += instance.weeks - std::min(c.earliest, instance.weeks + 1) + 1;
    }
  return total;
}

}  // namespace nucsched
