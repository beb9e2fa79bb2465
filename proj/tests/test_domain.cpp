#include "doctest.h"
#include "nucsched/domain.hpp"

#include <cmath>

using namespace nucsched;

namespace {

// one nuclear unit with a single refueling cycle plus one flexible unit
ProblemInstance tiny_instance(int weeks) {
    ProblemInstance inst;
    inst.weeks = weeks;
    inst.demand.assign(weeks, 0.0);
    inst.fuel_factor.assign(weeks, 1.0);

    T2Unit u;
    u.id = "n1";
    u.p_max.assign(weeks, 100.0);
    u.initial_fuel = 100.0;
    u.initial_bore_null = 0.0;
    u.final_fuel_credit = 5.0;

    CycleSpec c;
    c.duration = 1;
    c.earliest = 2;
    c.latest = weeks;
    c.refuel_min = 0.0;
    c.refuel_max = 60.0;
    c.refuel_cost = 1.0;
    c.loss_factor = 0.9;
    c.bore_null = 10.0;
    c.stock_max = 200.0;
    c.stock_max_before_outage = 200.0;
    u.cycles.push_back(c);
    inst.t2_units.push_back(u);

    T1Unit t;
    t.id = "t1";
    t.p_min.assign(weeks, 0.0);
    t.p_max.assign(weeks, 50.0);
    t.cost.assign(weeks, 10.0);
    inst.t1_units.push_back(t);
    return inst;
}

}  // namespace

TEST_CASE("financial cost with no production is minus the end-of-horizon fuel credit") {
    ProblemInstance inst = tiny_instance(4);
    DispatchPlan d = DispatchPlan::zeros(inst);
    d.horizon_fuel[0] = 100.0;
    CHECK(financial_cost(d, inst) == doctest::Approx(-500.0));
}

TEST_CASE("financial cost adds weighted flexible-fleet production cost") {
    ProblemInstance inst = tiny_instance(4);
    DispatchPlan d = DispatchPlan::zeros(inst);
    d.horizon_fuel[0] = 100.0;
    for (int w = 0; w < 4; ++w) d.t1_production[0][w] = 40.0;
    // 4 weeks * 40 * cost 10 * factor 1 = 1600, minus credit 500
    CHECK(financial_cost(d, inst) == doctest::Approx(1100.0));
}

TEST_CASE("financial cost is linear in flexible production") {
    ProblemInstance inst = tiny_instance(4);
    DispatchPlan d = DispatchPlan::zeros(inst);
    for (int w = 0; w < 4; ++w) d.t1_production[0][w] = 17.0;
    double base = financial_cost(d, inst);
    for (int w = 0; w < 4; ++w) d.t1_production[0][w] = 34.0;
    CHECK(financial_cost(d, inst) == doctest::Approx(2.0 * base));
}

TEST_CASE("flexible production cost carries the weekly fuel factor") {
    ProblemInstance inst = tiny_instance(4);
    inst.fuel_factor = {1.0, 2.0, 1.0, 1.0};
    DispatchPlan d = DispatchPlan::zeros(inst);
    d.t1_production[0][1] = 10.0;
    CHECK(financial_cost(d, inst) == doctest::Approx(200.0));
}

TEST_CASE("refuel amounts are priced per cycle") {
    ProblemInstance inst = tiny_instance(6);
    inst.t2_units[0].cycles[0].refuel_cost = 3.0;
    DispatchPlan d = DispatchPlan::zeros(inst);
    d.refuel[0][1] = 20.0;
    CHECK(financial_cost(d, inst) == doctest::Approx(60.0));
}

TEST_CASE("fuel recursion after a refueling outage") {
    ProblemInstance inst = tiny_instance(8);
    OutageSchedule s;
    s.week_of = {{5}};
    DispatchPlan d = DispatchPlan::zeros(inst);
    d.t2_production[0][0][0] = 50.0;  // burn 50 during campaign 0
    d.refuel[0] = {0.0, 30.0};
    FuelSimulation sim = simulate_fuel(s, d.refuel, d.t2_production, inst);
    CHECK(sim.fuel_end[0][0] == doctest::Approx(50.0));
    // x_start = bore 10 + refuel 30 + ((0.9 - 1)/0.9) * (50 - 0)
    CHECK(sim.fuel_start[0][1] == doctest::Approx(10.0 + 30.0 - 50.0 / 9.0));
    CHECK(sim.last_started_cycle[0] == 1);
}

TEST_CASE("without outages the horizon fuel equals initial fuel minus burn") {
    ProblemInstance inst = tiny_instance(8);
    OutageSchedule s;
    s.week_of = {{std::nullopt}};
    DispatchPlan d = DispatchPlan::zeros(inst);
    d.t2_production[0][0][2] = 25.0;
    FuelSimulation sim = simulate_fuel(s, d.refuel, d.t2_production, inst);
    CHECK(sim.horizon_fuel[0] == doctest::Approx(75.0));
    CHECK(sim.last_started_cycle[0] == 0);
}

TEST_CASE("weekly residual fuel tracks within-cycle depletion") {
    ProblemInstance inst = tiny_instance(4);
    OutageSchedule s;
    s.week_of = {{std::nullopt}};
    DispatchPlan d = DispatchPlan::zeros(inst);
    for (int w = 0; w < 4; ++w) d.t2_production[0][0][w] = 20.0;
    FuelSimulation sim = simulate_fuel(s, d.refuel, d.t2_production, inst);
    CHECK(sim.weekly_residual[0][0] == doctest::Approx(80.0));
    CHECK(sim.weekly_residual[0][3] == doctest::Approx(20.0));
}

TEST_CASE("schedule step function is monotone and respects conventions") {
    OutageSchedule s;
    s.week_of = {{5}};
    CHECK(s.step(0, 0, 1) == 1);
    CHECK(s.step(0, 1, 4) == 0);
    CHECK(s.step(0, 1, 5) == 1);
    CHECK(s.step(0, 1, 8) == 1);
    CHECK(s.step(0, 2, 8) == 0);
    for (int w = 2; w <= 8; ++w) CHECK(s.step(0, 1, w) >= s.step(0, 1, w - 1));
}

TEST_CASE("stability cost is zero at the baseline") {
    ProblemInstance inst = tiny_instance(10);
    inst.t2_units[0].cycles[0].baseline_week = 4;
    OutageSchedule s;
    s.week_of = {{4}};
    for (auto shape : {StabilityShape::count, StabilityShape::linear, StabilityShape::quadratic})
        CHECK(stability_cost(s, inst, shape) == doctest::Approx(0.0));
}

TEST_CASE("stability cost shapes for a moved outage") {
    ProblemInstance inst = tiny_instance(10);
    inst.t2_units[0].cycles[0].baseline_week = 4;
    OutageSchedule s;
    s.week_of = {{7}};
    CHECK(stability_cost(s, inst, StabilityShape::count) == doctest::Approx(1.0));
    CHECK(stability_cost(s, inst, StabilityShape::linear) == doctest::Approx(3.0));
    CHECK(stability_cost(s, inst, StabilityShape::quadratic) == doctest::Approx(9.0));
}

TEST_CASE("custom stability shape reads the per-week weights") {
    ProblemInstance inst = tiny_instance(10);
    inst.t2_units[0].cycles[0].stability_weights.assign(10, 0.0);
    inst.t2_units[0].cycles[0].stability_weights[6] = 2.5;
    OutageSchedule s;
    s.week_of = {{7}};
    CHECK(stability_cost(s, inst, StabilityShape::custom) == doctest::Approx(2.5));
}

TEST_CASE("stability cost without a baseline is an error for standard shapes") {
    ProblemInstance inst = tiny_instance(10);
    OutageSchedule s;
    s.week_of = {{4}};
    CHECK_THROWS_AS(stability_cost(s, inst, StabilityShape::linear), DomainError);
}

TEST_CASE("pairwise stability against a reference schedule") {
    ProblemInstance inst = tiny_instance(10);
    OutageSchedule a, b;
    a.week_of = {{4}};
    b.week_of = {{7}};
    CHECK(stability_cost_against(a, a, inst, StabilityShape::count) == doctest::Approx(0.0));
    CHECK(stability_cost_against(b, a, inst, StabilityShape::linear) == doctest::Approx(3.0));
    OutageSchedule skip;
    skip.week_of = {{std::nullopt}};
    CHECK(stability_cost_against(skip, a, inst, StabilityShape::quadratic) == doctest::Approx(1.0));
    CHECK(stability_cost_against(skip, skip, inst, StabilityShape::count) == doctest::Approx(0.0));
}

TEST_CASE("production during an outage week is flagged with its magnitude") {
    ProblemInstance inst = tiny_instance(8);
    inst.t2_units[0].cycles[0].duration = 2;
    Solution sol;
    sol.schedule.week_of = {{4}};
    sol.dispatch = DispatchPlan::zeros(inst);
    sol.dispatch.t2_production[0][1][3] = 10.0;  // week 4 lies inside the outage
    auto vs = validate(sol, inst);
    int n_ct3 = 0;
    for (const auto& v : vs)
        if (v.constraint == "CT3") {
            ++n_ct3;
            CHECK(v.magnitude == doctest::Approx(10.0));
        }
    CHECK(n_ct3 == 1);
}

TEST_CASE("refueling outside the allowed range is flagged") {
    ProblemInstance inst = tiny_instance(8);
    Solution sol;
    sol.schedule.week_of = {{4}};
    sol.dispatch = DispatchPlan::zeros(inst);
    sol.dispatch.refuel[0] = {0.0, inst.t2_units[0].cycles[0].refuel_max + 1.0};
    auto vs = validate(sol, inst);
    int n_ct7 = 0;
    for (const auto& v : vs)
        if (v.constraint == "CT7") {
            ++n_ct7;
            CHECK(v.magnitude == doctest::Approx(1.0));
        }
    CHECK(n_ct7 == 1);
}

TEST_CASE("a consistent zero-demand solution validates cleanly") {
    ProblemInstance inst = tiny_instance(8);
    inst.t2_units[0].cycles[0].refuel_min = 20.0;
    Solution sol;
    sol.schedule.week_of = {{4}};
    sol.dispatch = DispatchPlan::zeros(inst);
    sol.dispatch.refuel[0] = {0.0, 30.0};
    FuelSimulation sim =
        simulate_fuel(sol.schedule, sol.dispatch.refuel, sol.dispatch.t2_production, inst);
    sol.dispatch.fuel_start = sim.fuel_start;
    sol.dispatch.fuel_end = sim.fuel_end;
    sol.dispatch.horizon_fuel = sim.horizon_fuel;
    // keep the cycle-indexed arrays at full length k = 0..K
    sol.dispatch.fuel_start[0].resize(2, 0.0);
    sol.dispatch.fuel_end[0].resize(2, 0.0);
    auto vs = validate(sol, inst);
    CHECK(vs.empty());
}

TEST_CASE("missing a mandatory outage is flagged") {
    ProblemInstance inst = tiny_instance(8);
    inst.t2_units[0].cycles[0].latest = 6;  // window inside the horizon: mandatory
    Solution sol;
    sol.schedule.week_of = {{std::nullopt}};
    sol.dispatch = DispatchPlan::zeros(inst);
    sol.dispatch.fuel_start[0][0] = 100.0;
    sol.dispatch.fuel_end[0][0] = 100.0;
    sol.dispatch.horizon_fuel[0] = 100.0;
    auto vs = validate(sol, inst);
    bool found = false;
    for (const auto& v : vs)
        if (v.constraint == "CT13") found = true;
    CHECK(found);
}

TEST_CASE("resource over-consumption is flagged with the exceeded amount") {
    ProblemInstance inst = tiny_instance(8);
    ResourceConstraint rc;
    rc.id = "r1";
    rc.members = {{0, 1}};
    rc.weeks = {4};
    rc.cumulative = {std::vector<double>(8, 0.0)};
    for (int w = 4; w <= 8; ++w) rc.cumulative[0][w - 1] = 3.0;  // consumes 3 at week 4
    rc.capacity[4] = 1.0;
    inst.scheduling_constraints.push_back(rc);
    Solution sol;
    sol.schedule.week_of = {{4}};
    sol.dispatch = DispatchPlan::zeros(inst);
    FuelSimulation sim =
        simulate_fuel(sol.schedule, sol.dispatch.refuel, sol.dispatch.t2_production, inst);
    sol.dispatch.fuel_start = sim.fuel_start;
    sol.dispatch.fuel_end = sim.fuel_end;
    sol.dispatch.horizon_fuel = sim.horizon_fuel;
    sol.dispatch.fuel_start[0].resize(2, 0.0);
    sol.dispatch.fuel_end[0].resize(2, 0.0);
    auto vs = validate(sol, inst);
    int n_rc = 0;
    for (const auto& v : vs)
        if (v.constraint == "CT14-21") {
            ++n_rc;
            CHECK(v.magnitude == doctest::Approx(2.0));
        }
    CHECK(n_rc == 1);
}

TEST_CASE("relative gap against a best known solution") {
    CHECK(gap(101.0, 100.0) == doctest::Approx(0.01));
    CHECK(gap(100.0, 100.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(gap(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(gap(1.0, -5.0), DomainError);
}

TEST_CASE("gap statistics on an evenly spaced sample") {
    GapStats st = aggregate_stats({0.0, 0.01, 0.02, 0.03});
    CHECK(st.n_valid == 4);
    CHECK(st.n_failures == 0);
    CHECK(st.mean == doctest::Approx(0.015));
    CHECK(st.q2 == doctest::Approx(0.015));
    CHECK(st.q1 == doctest::Approx(0.0075));
    CHECK(st.q3 == doctest::Approx(0.0225));
    double var = (0.015 * 0.015 + 0.005 * 0.005 + 0.005 * 0.005 + 0.015 * 0.015) / 4.0;
    CHECK(st.stddev == doctest::Approx(std::sqrt(var)));
}

TEST_CASE("gap statistics with a single sample collapse to that value") {
    GapStats st = aggregate_stats({0.02});
    CHECK(st.mean == doctest::Approx(0.02));
    CHECK(st.q1 == doctest::Approx(0.02));
    CHECK(st.q2 == doctest::Approx(0.02));
    CHECK(st.q3 == doctest::Approx(0.02));
    CHECK(st.stddev == doctest::Approx(0.0));
}

TEST_CASE("gaps above one are counted as failures and excluded") {
    GapStats st = aggregate_stats({0.5, 2.0});
    CHECK(st.n_failures == 1);
    CHECK(st.n_valid == 1);
    CHECK(st.mean == doctest::Approx(0.5));
}

TEST_CASE("threshold counters report how many runs fall below each cutoff") {
    GapStats st = aggregate_stats({0.0, 3e-4, 5e-3, 0.5});
    REQUIRE(st.n_below.size() == 3);
    CHECK(st.n_below[0].first == doctest::Approx(1e-4));
    CHECK(st.n_below[0].second == 1);
    CHECK(st.n_below[1].second == 2);
    CHECK(st.n_below[2].second == 3);
}

TEST_CASE("instance validation reports every defect at once") {
    ProblemInstance inst = tiny_instance(8);
    inst.t2_units[0].cycles[0].loss_factor = 1.0;
    inst.t2_units[0].cycles[0].earliest = 9;
    inst.t2_units[0].cycles[0].latest = 3;
    try {
        inst.check_valid();
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        std::string msg = e.what();
        CHECK(msg.find("loss_factor") != std::string::npos);
        CHECK(msg.find("latest") != std::string::npos);
    }
}

TEST_CASE("demand length must match the horizon") {
    ProblemInstance inst = tiny_instance(8);
    inst.demand.pop_back();
    CHECK_THROWS_AS(inst.check_valid(), DomainError);
}
