#include "caresim/migration.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace caresim {

double relocation_cost(const SimulationState &s, const std::vector<AgentId> &movers, double k, double p) {
    double sum = 0.0;
    for (AgentId id : movers) {
        sum += std::pow(static_cast<double>(std::max(0, s.agent(id).years_in_town)), p);
    }
    return k * sum;
}

double relocation_cost(const SimulationState &s, HouseholdId household, double k, double p) {
    return relocation_cost(s, s.household(household).members, k, p);
}

double care_attraction(const SimulationState &s, const std::vector<KinEntry> &kin,
                       const std::vector<AgentId> &movers, TownId town, double alpha, double g) {
    double sum = 0.0;
    for (const auto &e : kin) {
        const auto &h = s.household(e.household);
        if (!h.active || h.town != town) {
            continue;
        }
        int count = 0;
        for (AgentId m : h.members) {
            if (std::find(movers.begin(), movers.end(), m) == movers.end()) {
                ++count;
            }
        }
        sum += std::exp(-alpha * e.distance) * count;
    }
    return (1.0 - g) * sum;
}

double care_attraction(const SimulationState &s, HouseholdId household, TownId town) {
    const auto &c = s.cfg();
    return care_attraction(s, household_kinship(s, household), s.household(household).members, town,
                           c.kinship_decay, c.gov_care_share);
}

TownCensus TownCensus::build(const SimulationState &s) {
    TownCensus census;
    const auto n = static_cast<std::size_t>(s.world.town_count());
    census.counts.assign(n, {});
    census.totals.assign(n, 0);
    for (const auto &h : s.households) {
        if (!h.active) {
            continue;
        }
        for (AgentId m : h.members) {
            ++census.counts[std::size_t(h.town)][std::size_t(index_of(s.agent(m).ses))];
            ++census.totals[std::size_t(h.town)];
        }
    }
    return census;
}

double TownCensus::homophily(TownId town, SesGroup ses) const noexcept {
    const auto t = static_cast<std::size_t>(town);
    if (t >= totals.size() || totals[t] == 0) {
        return 0.0;
    }
    return static_cast<double>(counts[t][std::size_t(index_of(ses))]) / totals[t];
}

namespace {

SesGroup group_ses(const SimulationState &s, const std::vector<AgentId> &movers) {
    for (AgentId id : movers) {
        if (s.agent(id).adult()) {
            return s.agent(id).ses;
        }
    }
    return movers.empty() ? SesGroup::C1 : s.agent(movers.front()).ses;
}

void merge_kin(std::vector<KinEntry> &into, const KinshipNetwork &net) {
    for (int d = 0; d < kKinshipDistances; ++d) {
        for (HouseholdId h : net.by_distance[std::size_t(d)]) {
            auto it = std::find_if(into.begin(), into.end(), [&](const KinEntry &e) { return e.household == h; });
            if (it == into.end()) {
                into.push_back({h, d});
            } else {
                it->distance = std::min(it->distance, d);
            }
        }
    }
}

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

MoveGroup MoveGroup::of_household(const SimulationState &s, HouseholdId household) {
    MoveGroup g;
    const auto &h = s.household(household);
    g.movers = h.members;
    g.kin = household_kinship(s, household);
    g.ses = group_ses(s, g.movers);
    g.from = h.town;
    return g;
}

MoveGroup MoveGroup::of_agents(const SimulationState &s, std::vector<AgentId> movers) {
    MoveGroup g;
    g.movers = std::move(movers);
    for (AgentId id : g.movers) {
        merge_kin(g.kin, build_kinship_network(s, id));
    }
    std::sort(g.kin.begin(), g.kin.end(),
              [](const KinEntry &a, const KinEntry &b) { return a.household < b.household; });
    g.ses = group_ses(s, g.movers);
    g.from = g.movers.empty() ? kNoTown : s.household(s.agent(g.movers.front()).household).town;
    return g;
}

double move_gate(const SimulationState &s, const TownCensus &census, const MoveGroup &g, TownId to) {
    const auto &c = s.cfg();
    const double cost = relocation_cost(s, g.movers, c.relocation_scale, c.relocation_exponent);
    const double att_to = care_attraction(s, g.kin, g.movers, to, c.kinship_decay, c.gov_care_share);
    const double att_from = care_attraction(s, g.kin, g.movers, g.from, c.kinship_decay, c.gov_care_share);
    const double hom = census.homophily(to, g.ses) - census.homophily(g.from, g.ses);
    return logistic(c.move_gate_bias + c.move_attraction_weight * (att_to - att_from) +
                    c.move_homophily_weight * hom - c.move_cost_weight * cost);
}

DestinationChoice evaluate_destinations(const SimulationState &s, const TownCensus &census,
                                        const MoveGroup &g, const std::vector<TownId> &candidates) {
    DestinationChoice out;
    double vacancy_total = 0.0;
    double weighted = 0.0;
    double gate_sum = 0.0;
    for (TownId t : candidates) {
        const double v = s.world.vacancy_share(t);
        const double gate = move_gate(s, census, g, t);
        out.towns.push_back(t);
        out.weights.push_back(v * gate);
        vacancy_total += v;
        weighted += v * gate;
        gate_sum += gate;
    }
    if (vacancy_total > 0.0) {
        out.move_probability = weighted / vacancy_total;
    } else if (!candidates.empty()) {
        out.move_probability = gate_sum / static_cast<double>(candidates.size());
    }
    return out;
}

HouseId vacant_house_near(const SimulationState &s, TownId town, Rng &rng) {
    if (auto h = s.world.random_vacant_house(town, rng)) {
        return *h;
    }
    if (auto t = s.world.nearest_town_with_vacancy(town)) {
        return *s.world.random_vacant_house(*t, rng);
    }
    throw SimulationError("no vacant house left on the map");
}

std::optional<HouseId> choose_destination(const SimulationState &s, const TownCensus &census,
                                          const MoveGroup &g, const std::vector<TownId> &candidates,
                                          bool forced, Rng &rng) {
    if (candidates.empty()) {
        return std::nullopt;
    }
    const auto choice = evaluate_destinations(s, census, g, candidates);
    if (!forced && !rng.bernoulli(choice.move_probability)) {
        return std::nullopt;
    }
    std::size_t i = rng.weighted_index(choice.weights);
    if (i >= choice.towns.size()) {
        i = 0;
    }
    return vacant_house_near(s, choice.towns[i], rng);
}

namespace {

using CareIndex = std::map<AgentId, std::map<HouseholdId, double>>;

CareIndex index_care(const CareLedger &ledger) {
    CareIndex idx;
    for (const auto &q : ledger.quanta) {
        idx[q.receiver][q.supplier_household] += q.hours;
    }
    return idx;
}

std::vector<std::pair<HouseholdId, double>> move_probabilities(const SimulationState &s, AgentId id,
                                                                const std::map<HouseholdId, double> *hours) {
    std::vector<std::pair<HouseholdId, double>> out;
    const auto &a = s.agent(id);
    const auto *summary = s.ledger.receiver(id);
    const double total = summary ? summary->informal + summary->formal : 0.0;
    std::vector<HouseholdId> homes;
    for (AgentId c : a.children) {
        if (s.is_alive(c) && s.agent(c).household != a.household) {
            homes.push_back(s.agent(c).household);
        }
    }
    std::sort(homes.begin(), homes.end());
    homes.erase(std::unique(homes.begin(), homes.end()), homes.end());
    for (HouseholdId h : homes) {
        double given = 0.0;
        if (hours) {
            if (auto it = hours->find(h); it != hours->end()) {
                given = it->second;
            }
        }
        const double p = total > 0.0 ? s.cfg().retiree_move_scale * given / total : 0.0;
        out.emplace_back(h, p);
    }
    return out;
}

std::optional<HouseholdId> move_in(SimulationState &s, AgentId id,
                                   const std::vector<std::pair<HouseholdId, double>> &probs, Rng &rng) {
    if (probs.empty()) {
        return std::nullopt;
    }
    const auto &a = s.agent(id);
    std::vector<AgentId> movers{id};
    if (a.partner != kNoAgent && s.agent(a.partner).household == a.household) {
        movers.push_back(a.partner);
    }
    // Leaving must not strand a dependent without an adult.
    const auto &home = s.household(a.household);
    bool adult_left = false;
    bool dependent_left = false;
    for (AgentId m : home.members) {
        if (std::find(movers.begin(), movers.end(), m) != movers.end()) {
            continue;
        }
        (s.agent(m).adult() ? adult_left : dependent_left) = true;
    }
    if (dependent_left && !adult_left) {
        return std::nullopt;
    }
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto &[h, p] : probs) {
        acc += p;
        if (u < acc) {
            for (AgentId m : movers) {
                s.join_household(m, h);
            }
            return h;
        }
    }
    return std::nullopt;
}

bool eligible_retiree(const Agent &a) {
    return a.alive && a.status == Status::Retired && a.care_need != CareNeedLevel::None;
}

} // namespace

std::vector<std::pair<HouseholdId, double>> retiree_move_probabilities(const SimulationState &s,
                                                                        AgentId retiree) {
    std::map<HouseholdId, double> hours;
    for (const auto &q : s.ledger.quanta) {
        if (q.receiver == retiree) {
            hours[q.supplier_household] += q.hours;
        }
    }
    return move_probabilities(s, retiree, &hours);
}

std::optional<HouseholdId> retiree_move_in(SimulationState &s, AgentId retiree, Rng &rng) {
    if (!eligible_retiree(s.agent(retiree))) {
        return std::nullopt;
    }
    return move_in(s, retiree, retiree_move_probabilities(s, retiree), rng);
}

std::optional<HouseholdId> independence_move(SimulationState &s, AgentId id, IndependenceTrigger trigger,
                                             TownId town, Rng &rng) {
    const auto &a = s.agent(id);
    if (trigger == IndependenceTrigger::None || !a.adult() || !s.has_parent_in_household(a)) {
        return std::nullopt;
    }
    if (trigger == IndependenceTrigger::InTownJob && !rng.bernoulli(s.cfg().independence_prob)) {
        return std::nullopt;
    }
    const HouseId house = vacant_house_near(s, town, rng);
    return s.move_to_new_house(id, house);
}

namespace {

bool lives_with_parents(const SimulationState &s, const Agent &a) {
    return a.partner == kNoAgent && s.has_parent_in_household(a);
}

std::optional<HouseId> larger_house(const SimulationState &s, const Household &h, Rng &rng) {
    const auto &town = s.world.town(h.town);
    const int size = static_cast<int>(h.members.size());
    const int current = s.world.house(h.house).bedrooms;
    std::vector<HouseId> fits;
    std::vector<HouseId> bigger;
    for (HouseId v : town.vacant) {
        const int b = s.world.house(v).bedrooms;
        if (b >= size) {
            fits.push_back(v);
        } else if (b > current) {
            bigger.push_back(v);
        }
    }
    auto &pool = fits.empty() ? bigger : fits;
    if (pool.empty()) {
        return std::nullopt;
    }
    std::sort(pool.begin(), pool.end());
    return pool[rng.index(pool.size())];
}

/// Dependents of `id` who would be left in a household with no adult.
std::vector<AgentId> stranded_dependents(const SimulationState &s, AgentId id,
                                         const std::vector<AgentId> &leaving) {
    const auto &home = s.household(s.agent(id).household);
    for (AgentId m : home.members) {
        if (s.agent(m).adult() && std::find(leaving.begin(), leaving.end(), m) == leaving.end()) {
            return {};
        }
    }
    std::vector<AgentId> out;
    for (AgentId m : home.members) {
        if (std::find(leaving.begin(), leaving.end(), m) == leaving.end()) {
            out.push_back(m);
        }
    }
    return out;
}

void move_group(SimulationState &s, const std::vector<AgentId> &movers, HouseholdId target) {
    std::vector<AgentId> all = movers;
    for (AgentId m : movers) {
        for (AgentId d : stranded_dependents(s, m, all)) {
            if (std::find(all.begin(), all.end(), d) == all.end()) {
                all.push_back(d);
            }
        }
    }
    for (AgentId m : all) {
        s.join_household(m, target);
    }
}

} // namespace

void colocate_couple(SimulationState &s, const TownCensus &census, AgentId male, AgentId female, Rng &rng) {
    const auto &m = s.agent(male);
    const auto &f = s.agent(female);
    if (m.household == f.household) {
        return;
    }
    if (!s.has_parent_in_household(f)) {
        move_group(s, {male}, f.household);
        return;
    }
    if (!s.has_parent_in_household(m)) {
        move_group(s, {female}, m.household);
        return;
    }
    const TownId mt = s.household(m.household).town;
    const TownId ft = s.household(f.household).town;
    std::vector<TownId> towns{mt};
    if (ft != mt) {
        towns.push_back(ft);
    }
    const auto group = MoveGroup::of_agents(s, {male, female});
    const HouseId house = *choose_destination(s, census, group, towns, true, rng);
    const HouseholdId h = s.create_household(house);
    move_group(s, {male, female}, h);
}

HouseholdId divorce_move(SimulationState &s, AgentId male, Rng &rng) {
    const TownId town = s.world.random_town_by_density(rng);
    const HouseId house = vacant_house_near(s, town, rng);
    return s.move_to_new_house(male, house);
}

RelocationEvents relocation_step(SimulationState &s, Rng &rng) {
    RelocationEvents ev;
    const auto &c = s.cfg();

    for (AgentId id : s.living()) {
        auto &a = s.agent(id);
        const TownId job_town = a.job_offer_town;
        a.job_offer_town = kNoTown;
        if (job_town == kNoTown) {
            if (a.hired_this_year && lives_with_parents(s, a) &&
                independence_move(s, id, IndependenceTrigger::InTownJob, s.household(a.household).town, rng)) {
                ++ev.independence_moves;
            }
            continue;
        }
        if (s.household(a.household).town == job_town) {
            continue;
        }
        if (lives_with_parents(s, a)) {
            if (independence_move(s, id, IndependenceTrigger::OutOfTownJob, job_town, rng)) {
                ++ev.independence_moves;
            }
            continue;
        }
        s.relocate_household(a.household, vacant_house_near(s, job_town, rng));
        ++ev.job_moves;
    }

    for (HouseholdId hid : s.active_households()) {
        const auto &h = s.household(hid);
        if (static_cast<int>(h.members.size()) <= s.world.house(h.house).bedrooms ||
            !rng.bernoulli(c.size_move_prob)) {
            continue;
        }
        if (auto house = larger_house(s, h, rng)) {
            s.relocate_household(hid, *house);
            ++ev.size_moves;
        }
    }

    const CareIndex idx = index_care(s.ledger);
    for (AgentId id : s.living()) {
        const auto &a = s.agent(id);
        if (!eligible_retiree(a)) {
            continue;
        }
        auto it = idx.find(id);
        if (it == idx.end()) {
            continue;
        }
        if (move_in(s, id, move_probabilities(s, id, &it->second), rng)) {
            ++ev.retiree_moves;
        }
    }
    s.counters.relocations += ev.total();
    return ev;
}

} // namespace caresim
