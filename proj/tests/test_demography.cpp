#include "doctest.h"
#include "support.h"

#include "caresim/demography.h"

#include <cmath>
#include <map>

using namespace caresim;
using namespace caresim::test;

TEST_CASE("Gompertz-Makeham probability") {
    const GompertzMakeham gm{0.001, 0.00005, 0.1};
    CHECK(gompertz_makeham_probability(gm, 70) == doctest::Approx(0.054301676687497152).epsilon(1e-12));
    CHECK(gompertz_makeham_probability({0.0, 0.0, 0.1}, 50) == 0.0);
    CHECK(gompertz_makeham_probability(gm, 90) > gompertz_makeham_probability(gm, 70));
    CHECK(gompertz_makeham_probability({5.0, 1.0, 0.5}, 100) == doctest::Approx(1.0));
}

TEST_CASE("mortality regimes by year") {
    const auto c = ScenarioConfig::defaults();
    CHECK(mortality_regime(c, c.start_year) == MortalityRegime::GompertzMakeham);
    CHECK(mortality_regime(c, c.census_year - 1) == MortalityRegime::GompertzMakeham);
    CHECK(mortality_regime(c, c.census_year) == MortalityRegime::Table);
    CHECK(mortality_regime(c, c.projection_year) == MortalityRegime::Table);
    CHECK(mortality_regime(c, c.projection_year + 1) == MortalityRegime::LeeCarter);
    CHECK(lee_carter_k(c, c.projection_year + 10) == doctest::Approx(c.lc_k0 + 10 * c.lc_drift));
}

TEST_CASE("mortality modifiers and clamping") {
    TinyWorld w(1, 4, ScenarioConfig::defaults(), flat_tables({.mortality = 0.5}));
    const auto h = w.home(0);
    const auto id = w.add(h, 80, Status::Retired, Sex::Male, SesGroup::D);
    w.need(id, CareNeedLevel::Critical);
    const auto &c = w.s.cfg();
    // D modifier 1.2 and critical modifier 2.0 push 0.5 past 1.
    CHECK(mortality_probability(w.s.agent(id), 2000, *w.s.tables, c) == 1.0);
    w.need(id, CareNeedLevel::None);
    CHECK(mortality_probability(w.s.agent(id), 2000, *w.s.tables, c) == doctest::Approx(0.6));
}

TEST_CASE("deaths at rates 0 and 1") {
    for (double rate : {0.0, 1.0}) {
        TinyWorld w(1, 20, neutral_config(), flat_tables({.mortality = rate}));
        for (int i = 0; i < 20; ++i) {
            w.add(w.home(0), 30 + i, Status::Employed);
        }
        const auto dead = apply_deaths(w.s, 2000, w.s.rng[Stream::Demography]);
        CHECK(dead.size() == (rate == 0.0 ? 0u : 20u));
        CHECK(w.s.population() == (rate == 0.0 ? 20u : 0u));
        w.s.check_invariants("deaths");
    }
}

TEST_CASE("death count at rate 0.1 is binomial and frozen") {
    TinyWorld w(1, 100, neutral_config(), flat_tables({.mortality = 0.1}));
    for (int i = 0; i < 100; ++i) {
        w.add(w.home(0), 40, Status::Employed);
    }
    const auto dead = apply_deaths(w.s, 2000, w.s.rng[Stream::Demography]);
    CHECK(dead.size() >= 2);
    CHECK(dead.size() <= 25);
    std::string text;
    for (AgentId id : dead) {
        text += std::to_string(id) + "\n";
    }
    const auto err = match_golden("deaths_rate_0.1.txt", text);
    CHECK_MESSAGE(!err, *err);
}

TEST_CASE("death frequency over many agents") {
    TinyWorld w(1, 1, neutral_config(), flat_tables({.mortality = 0.1}));
    const auto h = w.home(0);
    for (int i = 0; i < 5000; ++i) {
        w.add(h, 40, Status::Employed);
    }
    const double d = static_cast<double>(apply_deaths(w.s, 2000, w.s.rng[Stream::Demography]).size());
    CHECK(chi_square_p({d, 5000 - d}, {0.1, 0.9}) > 0.001);
}

TEST_CASE("orphans go to the nearest kin household with an adult") {
    TinyWorld w(2, 6);
    const auto gp = w.home(0);
    const auto gm = w.add(gp, 70, Status::Retired);
    const auto aunt_home = w.home(1);
    const auto mother = w.add(w.home(0), 35, Status::Employed);  // dead below
    const auto aunt = w.add(aunt_home, 33, Status::Employed);
    w.parent(mother, gm);
    w.parent(aunt, gm);
    const auto kid_home = w.s.agent(mother).household;
    const auto kid = w.add(kid_home, 6, Status::Child);
    w.parent(kid, mother);
    w.s.kill(mother);
    const auto moves = apply_adoptions(w.s, w.s.rng[Stream::Demography]);
    REQUIRE(moves.size() == 1);
    // Grandmother (distance 2) and aunt (distance 3): the grandmother wins.
    CHECK(moves[0].first == kid);
    CHECK(moves[0].second == gp);
    CHECK(w.s.agent(kid).household == gp);
    w.s.check_invariants("adoptions");
}

TEST_CASE("orphans without kin go to a couple household") {
    TinyWorld w(1, 6);
    const auto single = w.home(0);
    w.add(single, 50, Status::Employed);
    const auto pair_home = w.home(0);
    const auto a = w.add(pair_home, 40, Status::Employed, Sex::Male);
    const auto b = w.add(pair_home, 40, Status::Employed, Sex::Female);
    w.couple(a, b);
    const auto kid = w.add(w.home(0), 5, Status::Child);
    const auto moves = apply_adoptions(w.s, w.s.rng[Stream::Demography]);
    REQUIRE(moves.size() == 1);
    CHECK(w.s.agent(kid).household == pair_home);
}

TEST_CASE("orphan with no possible household throws") {
    TinyWorld w(1, 4);
    w.add(w.home(0), 50, Status::Employed);
    w.add(w.home(0), 5, Status::Child);
    CHECK_THROWS_AS(apply_adoptions(w.s, w.s.rng[Stream::Demography]), SimulationError);
}

TEST_CASE("adoption is uniform over couple households") {
    std::map<HouseholdId, double> counts;
    std::vector<HouseholdId> homes;
    for (int trial = 0; trial < 3000; ++trial) {
        TinyWorld w(1, 5);
        w.s.rng = RngStreams(std::uint64_t(trial) + 1);
        homes.clear();
        for (int k = 0; k < 3; ++k) {
            const auto h = w.home(0);
            const auto a = w.add(h, 40, Status::Employed, Sex::Male);
            const auto b = w.add(h, 40, Status::Employed, Sex::Female);
            w.couple(a, b);
            homes.push_back(h);
        }
        w.add(w.home(0), 5, Status::Child);
        counts[apply_adoptions(w.s, w.s.rng[Stream::Demography]).at(0).second] += 1.0;
    }
    std::vector<double> observed;
    for (auto h : homes) {
        observed.push_back(counts[h]);
    }
    CHECK(observed[0] + observed[1] + observed[2] == 3000.0);
    CHECK(chi_square_p(observed, {1.0 / 3, 1.0 / 3, 1.0 / 3}) > 0.001);
}

TEST_CASE("births need a co-resident partner and fertile age") {
    TinyWorld w(2, 6, neutral_config(), flat_tables({.fertility = 1.0}));
    const auto h1 = w.home(0);
    const auto m1 = w.add(h1, 30, Status::Employed, Sex::Male, SesGroup::C2);
    const auto f1 = w.add(h1, 28, Status::Employed, Sex::Female, SesGroup::B);
    w.couple(m1, f1);
    const auto h2 = w.home(0);
    const auto m2 = w.add(h2, 55, Status::Employed, Sex::Male);
    const auto f2 = w.add(h2, 50, Status::Employed, Sex::Female);
    w.couple(m2, f2);
    const auto m3 = w.add(w.home(0), 30, Status::Employed, Sex::Male);
    const auto f3 = w.add(w.home(1), 30, Status::Employed, Sex::Female);
    w.couple(m3, f3);
    w.add(w.home(1), 30, Status::Employed, Sex::Female);  // single

    const auto born = apply_births(w.s, 2000, w.s.rng[Stream::Demography]);
    REQUIRE(born.size() == 1);
    const auto &child = w.s.agent(born[0]);
    CHECK(child.mother == f1);
    CHECK(child.father == m1);
    CHECK(child.household == h1);
    CHECK(child.age == 0);
    CHECK(child.ses == SesGroup::B);
    CHECK(w.s.agent(f1).leave_years == w.s.cfg().newborn_leave_years);
    CHECK(w.s.agent(f1).worked_fraction == 0.0);
    CHECK(w.s.agent(m1).children == std::vector<AgentId>{born[0]});
    w.s.check_invariants("births");
}

TEST_CASE("no births at rate 0") {
    TinyWorld w(1, 4, neutral_config(), flat_tables({.fertility = 0.0}));
    const auto h = w.home(0);
    const auto m = w.add(h, 30, Status::Employed, Sex::Male);
    const auto f = w.add(h, 30, Status::Employed, Sex::Female);
    w.couple(m, f);
    CHECK(apply_births(w.s, 2000, w.s.rng[Stream::Demography]).empty());
}

TEST_CASE("partnership weight orderings") {
    const auto c = ScenarioConfig::defaults();
    Agent m, f;
    m.sex = Sex::Male;
    f.sex = Sex::Female;
    m.age = f.age = 30;
    m.ses = f.ses = SesGroup::C1;
    CHECK(partnership_weight(c, m, f, 0) == doctest::Approx(1.0));
    CHECK(partnership_weight(c, m, f, 2) == doctest::Approx(std::exp(-2 * c.partner_distance_weight)));
    f.age = 34;
    CHECK(partnership_weight(c, m, f, 0) == doctest::Approx(std::exp(-4 * c.partner_age_weight)));
    f.age = 30;
    m.ses = SesGroup::A;  // male two ranks higher
    const double male_higher = partnership_weight(c, m, f, 0);
    m.ses = SesGroup::C1;
    f.ses = SesGroup::A;
    const double female_higher = partnership_weight(c, m, f, 0);
    CHECK(male_higher > female_higher);
    CHECK(female_higher == doctest::Approx(std::exp(-2 * c.partner_ses_weight)));
    CHECK(male_higher == doctest::Approx(std::exp(-2 * c.partner_ses_weight * c.male_higher_asymmetry)));
}

TEST_CASE("market entry by age band") {
    auto c = ScenarioConfig::defaults();
    c.market_entry_rates = {0.1, 0.2, 0.3};
    CHECK(market_entry_probability(c, 15) == 0.0);
    CHECK(market_entry_probability(c, 16) == doctest::Approx(0.1));
    CHECK(market_entry_probability(c, 21) == doctest::Approx(0.2));
    CHECK(market_entry_probability(c, 80) == doctest::Approx(0.3));
}

TEST_CASE("close kin bars siblings but not cousins") {
    TinyWorld w(1, 8);
    const auto g = w.add(w.home(0), 70, Status::Retired);
    const auto p1 = w.add(w.home(0), 45, Status::Employed, Sex::Female);
    const auto p2 = w.add(w.home(0), 43, Status::Employed, Sex::Male);
    w.parent(p1, g);
    w.parent(p2, g);
    const auto a = w.add(w.home(0), 20, Status::Employed, Sex::Male);
    const auto b = w.add(w.home(0), 19, Status::Employed, Sex::Female);
    w.parent(a, p1);
    w.parent(b, p1);
    const auto cousin = w.add(w.home(0), 20, Status::Employed, Sex::Female);
    w.parent(cousin, p2);
    CHECK(close_kin(w.s, a, b));
    CHECK(close_kin(w.s, a, g));
    CHECK_FALSE(close_kin(w.s, a, cousin));
}

TEST_CASE("divorce at rates 0 and 1") {
    for (double rate : {0.0, 1.0}) {
        TinyWorld w(2, 20, neutral_config(), flat_tables({.divorce = rate}));
        std::vector<std::pair<AgentId, AgentId>> couples;
        for (int i = 0; i < 5; ++i) {
            const auto h = w.home(0);
            const auto m = w.add(h, 40, Status::Employed, Sex::Male);
            const auto f = w.add(h, 38, Status::Employed, Sex::Female);
            w.couple(m, f);
            couples.emplace_back(m, f);
        }
        const auto out = apply_divorces(w.s, 2000, w.s.rng[Stream::Demography]);
        CHECK(out.size() == (rate == 0.0 ? 0u : 5u));
        for (const auto &[m, f] : couples) {
            const bool split = rate == 1.0;
            CHECK((w.s.agent(m).partner == kNoAgent) == split);
            CHECK((w.s.agent(m).household != w.s.agent(f).household) == split);
        }
        w.s.check_invariants("divorces");
    }
}

TEST_CASE("divorces at rate 0.2 are frozen") {
    TinyWorld w(2, 80, neutral_config(), flat_tables({.divorce = 0.2}));
    for (int i = 0; i < 50; ++i) {
        const auto h = w.home(i % 2);
        const auto m = w.add(h, 40, Status::Employed, Sex::Male);
        const auto f = w.add(h, 38, Status::Employed, Sex::Female);
        w.couple(m, f);
    }
    const auto out = apply_divorces(w.s, 2000, w.s.rng[Stream::Demography]);
    CHECK(out.size() >= 2);
    CHECK(out.size() <= 22);
    std::string text;
    for (const auto &[m, f] : out) {
        text += std::to_string(m) + "," + std::to_string(f) + "," + std::to_string(w.s.agent(m).household) + "\n";
    }
    const auto err = match_golden("divorces_rate_0.2.txt", text);
    CHECK_MESSAGE(!err, *err);
}
