#include "doctest.h"
#include "support.h"

#include "caresim/migration.h"

#include <cmath>
#include <map>

using namespace caresim;
using namespace caresim::test;

TEST_CASE("relocation cost") {
    TinyWorld w;
    const auto h = w.home(0);
    const auto a = w.add(h, 40, Status::Employed);
    const auto b = w.add(h, 40, Status::Employed);
    w.s.agent(a).years_in_town = 4;
    w.s.agent(b).years_in_town = 9;
    CHECK(relocation_cost(w.s, h, 1.0, 0.5) == doctest::Approx(5.0));
    w.s.agent(a).years_in_town = 7;
    w.s.agent(b).years_in_town = 12;
    CHECK(relocation_cost(w.s, std::vector<AgentId>{a, b}, 0.3, 0.5) ==
          doctest::Approx(1.8329558778607036).epsilon(1e-12));
    CHECK(relocation_cost(w.s, std::vector<AgentId>{}, 0.3, 0.5) == 0.0);
}

TEST_CASE("relocation cost is concave in years") {
    TinyWorld w;
    const auto id = w.add(w.home(0), 40, Status::Employed);
    double prev = 0.0, prev_step = 1e9;
    for (int y = 1; y <= 40; ++y) {
        w.s.agent(id).years_in_town = y;
        const double r = relocation_cost(w.s, std::vector<AgentId>{id}, 0.3, 0.5);
        CHECK(r > prev);
        CHECK(r - prev < prev_step);
        prev_step = r - prev;
        prev = r;
    }
}

TEST_CASE("care attraction") {
    TinyWorld w(2, 6);
    const auto mine = w.home(0);
    const auto me = w.add(mine, 40, Status::Employed);
    const auto kin1 = w.home(1);
    for (int i = 0; i < 3; ++i) {
        w.add(kin1, 60, Status::Retired);
    }
    const auto kin2 = w.home(1);
    w.add(kin2, 30, Status::Employed);
    const std::vector<KinEntry> one{{kin1, 1}};
    CHECK(care_attraction(w.s, one, {me}, 1, 0.5, 0.25) == doctest::Approx(1.3646939843534252).epsilon(1e-12));
    CHECK(care_attraction(w.s, one, {me}, 0, 0.5, 0.25) == 0.0);
    CHECK(care_attraction(w.s, one, {me}, 1, 0.5, 1.0) == 0.0);
    const std::vector<KinEntry> own{{mine, 0}};
    // Movers never attract themselves.
    CHECK(care_attraction(w.s, own, {me}, 0, 0.5, 0.0) == 0.0);
    w.s.join_household(w.s.household(kin1).members[2], kin2);
    const std::vector<KinEntry> two{{kin1, 1}, {kin2, 2}};
    w.s.join_household(w.s.household(kin2).members[0], mine);
    CHECK(care_attraction(w.s, two, {me}, 1, 0.5, 0.1) == doctest::Approx(1.4228466845370383).epsilon(1e-12));
}

TEST_CASE("move gate responds to cost and attraction") {
    TinyWorld w(2, 6);
    const auto h = w.home(0);
    const auto me = w.add(h, 40, Status::Employed);
    const auto parents = w.home(1);
    const auto mum = w.add(parents, 70, Status::Retired);
    w.parent(me, mum);
    const auto census = TownCensus::build(w.s);
    const auto group = MoveGroup::of_household(w.s, h);
    const double toward_kin = move_gate(w.s, census, group, 1);
    w.s.agent(me).years_in_town = 30;
    const double rooted = move_gate(w.s, census, group, 1);
    CHECK(rooted < toward_kin);
    CHECK(toward_kin > 0.0);
    CHECK(toward_kin < 1.0);
    // The mother is drawn toward her son's town.
    w.s.agent(me).years_in_town = 0;
    const auto g2 = MoveGroup::of_household(w.s, parents);
    CHECK(move_gate(w.s, census, g2, 0) > move_gate(w.s, census, g2, 1));
}

TEST_CASE("homophily") {
    TinyWorld w(2, 6);
    w.add(w.home(0), 40, Status::Employed, Sex::Female, SesGroup::A);
    w.add(w.home(0), 40, Status::Employed, Sex::Female, SesGroup::D);
    const auto census = TownCensus::build(w.s);
    CHECK(census.homophily(0, SesGroup::A) == doctest::Approx(0.5));
    CHECK(census.homophily(1, SesGroup::A) == 0.0);
    CHECK(census.totals[0] == 2);
}

TEST_CASE("destinations are weighted by vacancy") {
    TinyWorld w(3, 10);
    for (int i = 0; i < 8; ++i) {
        w.add(w.home(1), 40, Status::Employed);
    }
    const auto h = w.home(0);
    w.add(h, 40, Status::Employed);
    const auto census = TownCensus::build(w.s);
    const auto group = MoveGroup::of_household(w.s, h);
    const auto choice = evaluate_destinations(w.s, census, group, {1, 2});
    REQUIRE(choice.weights.size() == 2);
    const double g1 = move_gate(w.s, census, group, 1);
    const double g2 = move_gate(w.s, census, group, 2);
    CHECK(choice.weights[0] == doctest::Approx(0.2 * g1));
    CHECK(choice.weights[1] == doctest::Approx(1.0 * g2));
    CHECK(choice.move_probability == doctest::Approx((0.2 * g1 + g2) / 1.2));
    // A single candidate moves with its own gate.
    const auto single = evaluate_destinations(w.s, census, group, {2});
    CHECK(single.move_probability == doctest::Approx(g2));
}

TEST_CASE("a move that the gate rejects stays put") {
    TinyWorld w(2, 6);
    const auto h = w.home(0);
    const auto me = w.add(h, 40, Status::Employed);
    w.s.agent(me).years_in_town = 10000;
    const auto census = TownCensus::build(w.s);
    const auto group = MoveGroup::of_household(w.s, h);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        CHECK(!choose_destination(w.s, census, group, {1}, false, rng));
        const auto forced = choose_destination(w.s, census, group, {1}, true, rng);
        REQUIRE(forced);
        CHECK(w.s.world.house(*forced).town == 1);
    }
}

TEST_CASE("full towns fall back to the nearest vacancy") {
    TinyWorld w(3, 2);
    w.add(w.home(0), 40, Status::Employed);
    w.add(w.home(0), 40, Status::Employed);
    Rng rng(1);
    CHECK(w.s.world.house(vacant_house_near(w.s, 0, rng)).town == 1);
    for (int i = 0; i < 4; ++i) {
        w.add(w.home(1 + i / 2), 40, Status::Employed);
    }
    CHECK_THROWS_AS(vacant_house_near(w.s, 0, rng), SimulationError);
}

namespace {

struct RetireeSetup {
    TinyWorld w{2, 8};
    AgentId gran = kNoAgent;
    HouseholdId home = kNoHousehold, busy = kNoHousehold, idle = kNoHousehold;

    RetireeSetup() {
        home = w.home(0);
        gran = w.add(home, 80, Status::Retired);
        w.need(gran, CareNeedLevel::Moderate);
        busy = w.home(0);
        idle = w.home(1);
        w.parent(w.add(busy, 50, Status::Unemployed), gran);
        w.parent(w.add(idle, 50, Status::Unemployed), gran);
        auto &l = w.s.ledger;
        l.quanta.push_back({gran, busy, kNoAgent, CareSource::Unemployed, CareKind::Informal, 1, 12, 0});
        l.quanta.push_back({gran, idle, kNoAgent, CareSource::OutOfIncome, CareKind::Formal, 1, 4, 60});
        l.receivers.push_back({gran, CareNeedLevel::Moderate, 16, 12, 4, 0, 0});
    }
};

} // namespace

TEST_CASE("retiree move probabilities follow care supplied") {
    RetireeSetup r;
    const auto p = retiree_move_probabilities(r.w.s, r.gran);
    REQUIRE(p.size() == 2);
    const double scale = r.w.s.cfg().retiree_move_scale;
    CHECK(p[0].first == r.busy);
    CHECK(p[0].second == doctest::Approx(scale * 0.75));
    CHECK(p[1].second == doctest::Approx(scale * 0.25));
}

TEST_CASE("retiree moves in 3:1 toward the bigger supplier") {
    std::map<HouseholdId, double> counts;
    const int n = 6000;
    HouseholdId busy = kNoHousehold, idle = kNoHousehold;
    for (int i = 0; i < n; ++i) {
        RetireeSetup r;
        busy = r.busy;
        idle = r.idle;
        Rng rng(static_cast<std::uint64_t>(i) + 1);
        const auto to = retiree_move_in(r.w.s, r.gran, rng);
        counts[to ? *to : kNoHousehold] += 1.0;
        if (to) {
            CHECK(r.w.s.agent(r.gran).household == *to);
        }
    }
    const double scale = ScenarioConfig::defaults().retiree_move_scale;
    CHECK(chi_square_p({counts[busy], counts[idle], counts[kNoHousehold]},
                       {0.75 * scale, 0.25 * scale, 1.0 - scale}) > 0.001);
}

TEST_CASE("retiree moves need care and must not strand a child") {
    {
        RetireeSetup r;
        r.w.need(r.gran, CareNeedLevel::None);
        Rng rng(1);
        CHECK(!retiree_move_in(r.w.s, r.gran, rng));
    }
    {
        RetireeSetup r;
        r.w.add(r.home, 8, Status::Child);
        r.w.s.config = std::make_shared<ScenarioConfig>([] {
            auto c = neutral_config();
            c.retiree_move_scale = 1.0;
            return c;
        }());
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Rng rng(seed);
            CHECK(!retiree_move_in(r.w.s, r.gran, rng));
        }
    }
}

TEST_CASE("independence moves") {
    TinyWorld w(2, 10);
    const auto h = w.home(0);
    const auto mum = w.add(h, 50, Status::Employed);
    const auto kid = w.add(h, 20, Status::Employed);
    const auto young = w.add(h, 12, Status::Child);
    w.parent(kid, mum);
    w.parent(young, mum);
    Rng rng(5);
    CHECK(!independence_move(w.s, kid, IndependenceTrigger::None, 0, rng));
    CHECK(!independence_move(w.s, young, IndependenceTrigger::OutOfTownJob, 1, rng));
    CHECK(!independence_move(w.s, mum, IndependenceTrigger::OutOfTownJob, 1, rng));
    const auto moved = independence_move(w.s, kid, IndependenceTrigger::OutOfTownJob, 1, rng);
    REQUIRE(moved);
    CHECK(w.s.household(*moved).town == 1);
    CHECK(w.s.agent(kid).household == *moved);
    CHECK(w.s.household(*moved).members.size() == 1);
    w.s.check_invariants("independence");
}

TEST_CASE("in-town job independence happens with the configured probability") {
    double moved = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        TinyWorld w(1, 3);
        const auto h = w.home(0);
        const auto mum = w.add(h, 50, Status::Employed);
        const auto kid = w.add(h, 20, Status::Employed);
        w.parent(kid, mum);
        Rng rng(static_cast<std::uint64_t>(i) + 1);
        moved += independence_move(w.s, kid, IndependenceTrigger::InTownJob, 0, rng).has_value();
    }
    const double p = ScenarioConfig::defaults().independence_prob;
    CHECK(chi_square_p({moved, n - moved}, {p, 1 - p}) > 0.001);
}

TEST_CASE("divorced men move out") {
    TinyWorld w(2, 6);
    const auto h = w.home(0);
    const auto m = w.add(h, 40, Status::Employed, Sex::Male);
    w.add(h, 40, Status::Employed);
    Rng rng(2);
    const auto nh = divorce_move(w.s, m, rng);
    CHECK(nh != h);
    CHECK(w.s.agent(m).household == nh);
    CHECK(w.s.household(h).members.size() == 1);
}
