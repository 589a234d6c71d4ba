#include "doctest.h"
#include "support.h"

#include "caresim/engine.h"

#include <algorithm>
#include <sstream>

using namespace caresim;
using namespace caresim::test;

namespace {

std::string csv(const std::vector<MetricsRow> &rows) {
    std::ostringstream out;
    write_metrics_csv(out, rows);
    return out.str();
}

std::string census(const SimulationState &s) {
    std::ostringstream out;
    for (const auto &a : s.agents) {
        out << a.id << ' ' << a.age << ' ' << int(a.sex) << ' ' << int(a.ses) << ' ' << int(a.status) << ' '
            << a.household << ' ' << a.partner << '\n';
    }
    return out.str();
}

} // namespace

TEST_CASE("phase order") {
    auto at = [](std::string_view p) { return std::find(kPhases.begin(), kPhases.end(), p) - kPhases.begin(); };
    CHECK(kPhases.front() == "deaths");
    CHECK(kPhases.back() == "care_transitions");
    CHECK(at("care_allocation") < at("job_market"));
    CHECK(at("births") < at("marriages"));
}

TEST_CASE("initialisation") {
    auto c = ScenarioConfig::defaults();
    c.initial_population = 500;
    c.check_invariants = true;
    const auto a = initialize(c, default_tables());
    const auto b = initialize(c, default_tables());
    CHECK(a.population() == 500);
    CHECK(a.year == c.start_year);
    CHECK(census(a) == census(b));
    c.seed = 2;
    CHECK(census(initialize(c, default_tables())) != census(a));
    a.check_invariants("init");
    for (const auto &ag : a.agents) {
        if (ag.partner != kNoAgent) {
            CHECK(a.agent(ag.partner).partner == ag.id);
        }
    }
}

TEST_CASE("towns with zero density stay empty") {
    auto c = ScenarioConfig::defaults();
    c.initial_population = 400;
    c.density_weights[0] = 0.0;
    c.density_weights[13] = 0.0;
    const auto s = initialize(c, default_tables());
    CHECK(s.world.town(0).houses.empty());
    CHECK(s.world.town(13).houses.empty());
    for (const auto &h : s.households) {
        CHECK(h.town != 0);
        CHECK(h.town != 13);
    }
}

TEST_CASE("invalid configs are rejected") {
    auto c = ScenarioConfig::defaults();
    c.quantum_hours = 3;
    CHECK_THROWS_AS(initialize(c, default_tables()), ConfigError);
}

TEST_CASE("an empty population runs to the end") {
    auto c = ScenarioConfig::defaults();
    c.initial_population = 0;
    c.check_invariants = true;
    const auto rows = run_simulation(c, default_tables());
    CHECK(rows.size() == std::size_t(c.end_year - c.reporting_start_year + 1));
    for (const auto &r : rows) {
        CHECK(r.population == 0);
        CHECK(r.total.receivers == 0);
    }
}

TEST_CASE("step_year refuses to pass the end") {
    auto c = ScenarioConfig::defaults();
    c.initial_population = 0;
    auto s = initialize(c, default_tables());
    s.year = c.end_year;
    CHECK_THROWS(step_year(s));
}

TEST_CASE("a 200-agent run is frozen") {
    auto c = ScenarioConfig::defaults();
    c.initial_population = 200;
    c.check_invariants = true;
    const auto rows = run_simulation(c, default_tables());
    REQUIRE(!rows.empty());
    const auto err = match_golden("run_200_seed1.csv", csv(rows));
    CHECK_MESSAGE(!err, *err);
}

TEST_CASE("equal config and seed give byte-identical output") {
    auto c = ScenarioConfig::defaults();
    c.initial_population = 300;
    c.seed = 21;
    CHECK(csv(run_simulation(c, default_tables())) == csv(run_simulation(c, default_tables())));
}

TEST_CASE("care is allocated before the job market") {
    auto c = ScenarioConfig::defaults();
    c.initial_population = 300;
    auto s = initialize(c, default_tables());
    run_until(s, 1900);
    step_year(s);
    CHECK(s.ledger.year == s.year);
}

TEST_CASE("ageing moves agents through life stages") {
    TinyWorld w;
    const auto h = w.home(0);
    const auto child = w.add(h, 12, Status::Child);
    const auto worker = w.add(h, 64, Status::Employed);
    age_transitions(w.s);
    CHECK(w.s.agent(child).age == 13);
    CHECK(w.s.agent(child).status == Status::Teenager);
    CHECK(w.s.agent(worker).age == 65);
    CHECK(w.s.agent(worker).status == Status::Retired);
}
