#include "caresim/demography.h"

#include "caresim/kinship.h"
#include "caresim/migration.h"

#include <algorithm>
#include <cmath>

namespace caresim {

MortalityRegime mortality_regime(const ScenarioConfig &c, int year) noexcept {
    if (year < c.census_year) {
        return MortalityRegime::GompertzMakeham;
    }
    if (year <= c.projection_year) {
        return MortalityRegime::Table;
    }
    return MortalityRegime::LeeCarter;
}

double gompertz_makeham_probability(const GompertzMakeham &gm, int age) noexcept {
    const double hazard = gm.a + gm.b * std::exp(gm.c * static_cast<double>(age));
    return 1.0 - std::exp(-std::max(0.0, hazard));
}

double lee_carter_k(const ScenarioConfig &c, int year) noexcept {
    return c.lc_k0 + c.lc_drift * static_cast<double>(year - c.projection_year);
}

double base_mortality(int age, Sex sex, int year, const RateTables &t, const ScenarioConfig &c) {
    switch (mortality_regime(c, year)) {
    case MortalityRegime::GompertzMakeham:
        return gompertz_makeham_probability(sex == Sex::Male ? c.gm_male : c.gm_female, age);
    case MortalityRegime::Table:
        return t.mortality.at(age, sex, SesGroup::A, year);
    case MortalityRegime::LeeCarter: {
        const double log_m = t.lee_carter_ax.at(age, sex, SesGroup::A, year) +
                             t.lee_carter_bx.at(age, sex, SesGroup::A, year) * lee_carter_k(c, year);
        return 1.0 - std::exp(-std::exp(log_m));
    }
    }
    return 0.0;
}

double mortality_probability(const Agent &a, int year, const RateTables &t, const ScenarioConfig &c) {
    const double p = base_mortality(a.age, a.sex, year, t, c) *
                     c.mortality_ses_modifier[std::size_t(index_of(a.ses))] *
                     c.mortality_care_modifier[std::size_t(index_of(a.care_need))];
    return std::clamp(p, 0.0, 1.0);
}

std::vector<AgentId> apply_deaths(SimulationState &s, int year, Rng &rng) {
    std::vector<AgentId> dead;
    for (AgentId id : s.living()) {
        const double p = mortality_probability(s.agent(id), year, *s.tables, s.cfg());
        if (rng.keyed_bernoulli(p, std::uint64_t(DrawTag::Death), std::uint64_t(year), id)) {
            dead.push_back(id);
        }
    }
    for (AgentId id : dead) {
        s.kill(id);
    }
    s.counters.deaths += static_cast<int>(dead.size());
    return dead;
}

namespace {

bool is_couple_household(const SimulationState &s, const Household &h) {
    for (AgentId m : h.members) {
        const auto &a = s.agent(m);
        if (a.partner != kNoAgent && s.agent(a.partner).household == h.id) {
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<std::pair<AgentId, HouseholdId>> apply_adoptions(SimulationState &s, Rng &rng) {
    std::vector<std::pair<AgentId, HouseholdId>> out;
    for (AgentId id : s.living()) {
        const auto &a = s.agent(id);
        if (!a.dependent() || s.has_adult(a.household)) {
            continue;
        }
        const auto net = build_kinship_network(s, id);
        std::vector<HouseholdId> pick;
        for (int d = 1; d < kKinshipDistances && pick.empty(); ++d) {
            for (HouseholdId h : net.by_distance[std::size_t(d)]) {
                if (s.has_adult(h)) {
                    pick.push_back(h);
                }
            }
        }
        if (pick.empty()) {
            for (const auto &h : s.households) {
                if (h.active && h.id != a.household && is_couple_household(s, h)) {
                    pick.push_back(h.id);
                }
            }
        }
        if (pick.empty()) {
            throw SimulationError("orphan " + std::to_string(id) +
                                  " cannot be adopted: no household with an adult");
        }
        const HouseholdId target = pick[rng.index(pick.size())];
        s.join_household(id, target);
        out.emplace_back(id, target);
    }
    s.counters.adoptions += static_cast<int>(out.size());
    return out;
}

std::vector<AgentId> apply_births(SimulationState &s, int year, Rng &rng) {
    const auto &c = s.cfg();
    std::vector<AgentId> mothers;
    for (AgentId id : s.living()) {
        const auto &a = s.agent(id);
        if (a.sex != Sex::Female || a.partner == kNoAgent || a.age < c.fertile_min_age ||
            a.age > c.fertile_max_age) {
            continue;
        }
        if (s.agent(a.partner).household != a.household) {
            continue;
        }
        const double p = std::clamp(s.tables->fertility.at(a.age, a.sex, a.ses, year), 0.0, 1.0);
        if (rng.keyed_bernoulli(p, std::uint64_t(DrawTag::Birth), std::uint64_t(year), id)) {
            mothers.push_back(id);
        }
    }
    std::vector<AgentId> born;
    for (AgentId m : mothers) {
        const auto &mother = s.agent(m);
        const auto &father = s.agent(mother.partner);
        Agent child;
        child.sex = rng.keyed_bernoulli(0.5, std::uint64_t(DrawTag::BirthSex), std::uint64_t(year), m) ? Sex::Female : Sex::Male;
        child.age = 0;
        child.birth_year = year;
        child.ses = std::min(mother.ses, father.ses);
        child.status = Status::Child;
        child.household = mother.household;
        child.mother = m;
        child.father = mother.partner;
        const AgentId id = s.add_agent(std::move(child));
        auto &mom = s.agent(m);
        mom.children.push_back(id);
        s.agent(mom.partner).children.push_back(id);
        mom.worked_fraction = 0.0;
        mom.leave_years = std::max(mom.leave_years, c.newborn_leave_years);
        born.push_back(id);
    }
    s.counters.births += static_cast<int>(born.size());
    return born;
}

double partnership_weight(const ScenarioConfig &c, const Agent &male, const Agent &female,
                          int grid_distance) noexcept {
    const int gap = ses_rank(male.ses) - ses_rank(female.ses);
    double ses_dist = std::abs(gap);
    if (gap > 0) {
        ses_dist *= c.male_higher_asymmetry;
    }
    return std::exp(-c.partner_ses_weight * ses_dist) *
           std::exp(-c.partner_age_weight * std::abs(male.age - female.age)) *
           std::exp(-c.partner_distance_weight * grid_distance);
}

double market_entry_probability(const ScenarioConfig &c, int age) noexcept {
    if (age < 16 || c.market_entry_rates.empty()) {
        return 0.0;
    }
    const auto band = std::min<std::size_t>(std::size_t((age - 16) / 5), c.market_entry_rates.size() - 1);
    return std::clamp(c.market_entry_rates[band], 0.0, 1.0);
}

bool close_kin(const SimulationState &s, AgentId a, AgentId b) {
    const auto rel = relatives_by_degree(s, a);
    for (int d = 1; d <= 2; ++d) {
        const auto &v = rel[std::size_t(d)];
        if (std::binary_search(v.begin(), v.end(), b)) {
            return true;
        }
    }
    return false;
}

std::vector<std::pair<AgentId, AgentId>> form_partnerships(SimulationState &s, int year, Rng &rng) {
    (void)year;
    const auto &c = s.cfg();
    std::vector<AgentId> males;
    std::vector<AgentId> females;
    for (AgentId id : s.living()) {
        const auto &a = s.agent(id);
        if (a.partner != kNoAgent || a.age < 16) {
            continue;
        }
        if (a.sex == Sex::Female) {
            females.push_back(id);
        } else if (a.status == Status::Employed && rng.bernoulli(market_entry_probability(c, a.age))) {
            males.push_back(id);
        }
    }
    rng.shuffle(males);
    std::vector<std::pair<AgentId, AgentId>> pairs;
    std::vector<double> weights(females.size());
    const TownCensus census = TownCensus::build(s);
    for (AgentId mid : males) {
        if (females.empty()) {
            break;
        }
        const auto &m = s.agent(mid);
        const TownId mt = s.household(m.household).town;
        const auto rel = relatives_by_degree(s, mid);
        auto related = [&](AgentId f) {
            return std::binary_search(rel[1].begin(), rel[1].end(), f) ||
                   std::binary_search(rel[2].begin(), rel[2].end(), f);
        };
        weights.resize(females.size());
        for (std::size_t i = 0; i < females.size(); ++i) {
            const auto &f = s.agent(females[i]);
            if (f.household == m.household || related(f.id)) {
                weights[i] = 0.0;
                continue;
            }
            weights[i] = partnership_weight(c, m, f, s.world.grid_distance(mt, s.household(f.household).town));
        }
        const std::size_t pick = rng.weighted_index(weights);
        if (pick >= females.size()) {
            continue;
        }
        const AgentId fid = females[pick];
        females.erase(females.begin() + static_cast<std::ptrdiff_t>(pick));
        s.agent(mid).partner = fid;
        s.agent(fid).partner = mid;
        colocate_couple(s, census, mid, fid, rng);
        pairs.emplace_back(mid, fid);
    }
    s.counters.marriages += static_cast<int>(pairs.size());
    return pairs;
}

std::vector<std::pair<AgentId, AgentId>> apply_divorces(SimulationState &s, int year, Rng &rng) {
    std::vector<std::pair<AgentId, AgentId>> out;
    for (AgentId id : s.living()) {
        const auto &a = s.agent(id);
        if (a.sex != Sex::Male || a.partner == kNoAgent) {
            continue;
        }
        const auto &f = s.agent(a.partner);
        const double p = std::clamp(s.tables->divorce.at(f.age, f.sex, f.ses, year), 0.0, 1.0);
        if (rng.keyed_bernoulli(p, std::uint64_t(DrawTag::Divorce), std::uint64_t(year), id)) {
            out.emplace_back(id, a.partner);
        }
    }
    for (const auto &[m, f] : out) {
        s.agent(m).partner = kNoAgent;
        s.agent(f).partner = kNoAgent;
        if (s.agent(m).household == s.agent(f).household) {
            divorce_move(s, m, rng);
        }
    }
    s.counters.divorces += static_cast<int>(out.size());
    return out;
}

} // namespace caresim
