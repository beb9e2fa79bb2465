#include "doctest.h"
#include "nucsched/instance_io.hpp"
#include "nucsched/oracle.hpp"

using namespace nucsched;

namespace {

ProblemInstance tiny(unsigned seed, int n_t2 = 2, int n_cycles = 1, int weeks = 20) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.n_t2 = n_t2;
    cfg.n_cycles = n_cycles;
    cfg.weeks = weeks;
    return generate(cfg);
}

// feasible incumbent with every outage pinned at a given offset from earliest
Solution pinned_solution(const ProblemInstance& inst, int offset) {
    OutageSchedule s = OutageSchedule::empty(inst);
    for (size_t i = 0; i < inst.t2_units.size(); ++i)
        for (int k = 1; k <= inst.num_cycles(static_cast<int>(i)); ++k) {
            int w = std::min(inst.cycle(static_cast<int>(i), k).earliest + offset,
                             inst.latest_start(static_cast<int>(i), k));
            s.week_of[i][k - 1] = w;
        }
    auto [lp, vm] = build_dispatch_lp(inst, s);
    milp::SolveOutcome out = milp::solve(lp, {});
    REQUIRE(out.status == milp::SolveStatus::optimal);
    Solution sol = extract_solution(out, vm, inst);
    REQUIRE(sol.feasible());
    return sol;
}

}  // namespace

TEST_CASE("neighborhood labels are informative") {
    CHECK(NeighborhoodSpec::rins().label() == "rins");
    CHECK(NeighborhoodSpec::local_branching(3).label() == "local_branching(3)");
    CHECK(NeighborhoodSpec::units({0, 2}).label() == "units(0|2)");
    CHECK(NeighborhoodSpec::cycles(1, 2).label() == "cycles(1,2)");
    CHECK(NeighborhoodSpec::time_window(1, 3).label() == "time_window(1,3)");
}

TEST_CASE("a zero-radius restriction keeps exactly the incumbent") {
    ProblemInstance inst = tiny(1);
    Solution inc = pinned_solution(inst, 1);
    auto [model, vm] = build_compact(inst);
    milp::Model sub = restrict(model, vm, inc, NeighborhoodSpec::time_window(0, 0));
    milp::SolveOutcome out = milp::solve(sub, {});
    REQUIRE(out.status == milp::SolveStatus::optimal);
    Solution sol = extract_solution(out, vm, inst);
    CHECK(sol.schedule == inc.schedule);
}

TEST_CASE("the incumbent stays feasible in every restriction") {
    ProblemInstance inst = tiny(2);
    Solution inc = pinned_solution(inst, 0);
    auto [model, vm] = build_compact(inst);
    for (auto spec : {NeighborhoodSpec::time_window(0, 2), NeighborhoodSpec::units({1}),
                      NeighborhoodSpec::cycles(1, 1), NeighborhoodSpec::local_branching(2),
                      NeighborhoodSpec::rins()}) {
        milp::Model sub = restrict(model, vm, inc, spec);
        std::vector<double> ws = warmstart_assignment(sub, vm, inc, inst);
        CHECK_MESSAGE(milp::assignment_feasible(sub, ws), spec.label());
    }
}

TEST_CASE("restricted model optima match the independent restricted enumeration") {
    ProblemInstance inst = tiny(3);
    Solution inc = pinned_solution(inst, 2);
    auto [model, vm] = build_compact(inst);
    for (auto spec : {NeighborhoodSpec::time_window(0, 2), NeighborhoodSpec::units({0}),
                      NeighborhoodSpec::cycles(1, 1), NeighborhoodSpec::local_branching(1),
                      NeighborhoodSpec::rins()}) {
        milp::Model sub = restrict(model, vm, inc, spec);
        milp::SolveOutcome out = milp::solve(sub, {});
        REQUIRE_MESSAGE(out.has_solution(), spec.label());
        OracleResult oracle = restricted_optimal(inst, inc, spec);
        REQUIRE_MESSAGE(oracle.found, spec.label());
        CHECK_MESSAGE(out.objective ==
                          doctest::Approx(oracle.best.cost.financial()).epsilon(1e-6),
                      spec.label());
    }
}

TEST_CASE("descent improves monotonically and stops at a joint local minimum") {
    ProblemInstance inst = tiny(4);
    Solution start = pinned_solution(inst, 3);
    SequencePolicy policy;
    policy.neighborhoods = {NeighborhoodSpec::time_window(0, 2), NeighborhoodSpec::units({0}),
                            NeighborhoodSpec::units({1})};
    auto [best, trace] = vnd(inst, start, policy);
    CHECK(best.feasible());
    CHECK(best.cost.financial() <= start.cost.financial() + 1e-9);
    double prev = start.cost.financial();
    for (const auto& row : trace.rows) {
        CHECK(row.objective_after <= row.objective_before + 1e-9);
        CHECK(row.objective_before == doctest::Approx(prev));
        prev = row.objective_after;
    }
    // stops only when every neighborhood failed in a row
    int n = static_cast<int>(policy.neighborhoods.size());
    REQUIRE(static_cast<int>(trace.rows.size()) >= n);
    for (int t = static_cast<int>(trace.rows.size()) - n; t < static_cast<int>(trace.rows.size());
         ++t)
        CHECK(trace.rows[t].status != "improved");
}

TEST_CASE("descent over wide neighborhoods reaches the global optimum") {
    ProblemInstance inst = tiny(5);
    Solution start = pinned_solution(inst, 4);
    OracleResult all = enumerate_optimal(inst);
    REQUIRE(all.found);

    SequencePolicy policy;
    policy.neighborhoods = {NeighborhoodSpec::units({0}), NeighborhoodSpec::units({1}),
                            NeighborhoodSpec::time_window(1, 3)};
    auto [best, trace] = vnd(inst, start, policy);
    CHECK(best.cost.financial() == doctest::Approx(all.best.cost.financial()).epsilon(1e-6));
}

TEST_CASE("the trace serializes to csv") {
    ProblemInstance inst = tiny(6);
    Solution start = pinned_solution(inst, 1);
    SequencePolicy policy;
    policy.neighborhoods = {NeighborhoodSpec::time_window(0, 1)};
    policy.max_iterations = 3;
    policy.stopping = SequencePolicy::Stopping::max_iterations;
    auto [best, trace] = vnd(inst, start, policy);
    std::string csv = trace.to_csv();
    CHECK(csv.find("iteration,neighborhood,status,objective_before,objective_after,seconds") == 0);
    CHECK(csv.find("time_window(0,1)") != std::string::npos);
}

TEST_CASE("partitions cover the fleet") {
    GeneratorConfig cfg;
    cfg.seed = 7;
    cfg.n_t2 = 4;
    cfg.n_cycles = 2;
    cfg.weeks = 40;
    cfg.n_resource_constraints = 1;
    ProblemInstance inst = generate(cfg);

    auto per_unit = popmusic_partitions(inst, PartitionKind::per_unit);
    CHECK(per_unit.size() == 4);
    std::vector<bool> seen(4, false);
    for (const auto& s : per_unit)
        for (int i : s.unit_set) seen[i] = true;
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));

    auto per_cycle = popmusic_partitions(inst, PartitionKind::per_cycle);
    CHECK(per_cycle.size() == 2);
    CHECK(per_cycle[0].k_lo == 1);
    CHECK(per_cycle[1].k_hi == 2);

    auto per_site = popmusic_partitions(inst, PartitionKind::per_site, 2);
    std::vector<bool> covered(4, false);
    for (const auto& s : per_site) {
        CHECK(static_cast<int>(s.unit_set.size()) >= 2);
        for (int i : s.unit_set) covered[i] = true;
    }
    CHECK(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }));
}
