#include "caresim/state.h"

#include <json.hpp>

#include <algorithm>
#include <map>

namespace caresim {

std::vector<AgentId> SimulationState::living() const {
    std::vector<AgentId> out;
    out.reserve(living_count_);
    for (const auto &a : agents) {
        if (a.alive) {
            out.push_back(a.id);
        }
    }
    return out;
}

std::vector<HouseholdId> SimulationState::active_households() const {
    std::vector<HouseholdId> out;
    for (const auto &h : households) {
        if (h.active) {
            out.push_back(h.id);
        }
    }
    return out;
}

AgentId SimulationState::add_agent(Agent a) {
    a.id = static_cast<AgentId>(agents.size());
    a.alive = true;
    const HouseholdId target = a.household;
    a.household = kNoHousehold;
    agents.push_back(std::move(a));
    ++living_count_;
    const AgentId id = agents.back().id;
    if (target != kNoHousehold) {
        household(target).members.push_back(id);
        agent(id).household = target;
    }
    return id;
}

HouseholdId SimulationState::create_household(HouseId house) {
    Household h;
    h.id = static_cast<HouseholdId>(households.size());
    h.house = house;
    h.town = world.house(house).town;
    h.active = true;
    world.occupy(house, h.id);
    households.push_back(std::move(h));
    return households.back().id;
}

void SimulationState::leave_household(AgentId id) {
    auto &a = agent(id);
    if (a.household == kNoHousehold) {
        return;
    }
    auto &h = household(a.household);
    auto it = std::find(h.members.begin(), h.members.end(), id);
    if (it != h.members.end()) {
        h.members.erase(it);
    }
    a.household = kNoHousehold;
    if (h.members.empty()) {
        h.active = false;
        world.vacate(h.house);
        h.house = kNoHouse;
    }
}

void SimulationState::join_household(AgentId id, HouseholdId target) {
    auto &a = agent(id);
    if (a.household == target) {
        return;
    }
    const TownId old_town = a.household != kNoHousehold ? household(a.household).town : kNoTown;
    leave_household(id);
    auto &h = household(target);
    h.members.push_back(id);
    a.household = target;
    if (h.town != old_town) {
        a.years_in_town = 0;
    }
}

HouseholdId SimulationState::move_to_new_house(AgentId id, HouseId house) {
    const HouseholdId h = create_household(house);
    join_household(id, h);
    return h;
}

void SimulationState::relocate_household(HouseholdId id, HouseId house) {
    auto &h = household(id);
    const TownId old_town = h.town;
    world.occupy(house, id);
    world.vacate(h.house);
    h.house = house;
    h.town = world.house(house).town;
    if (h.town != old_town) {
        for (AgentId m : h.members) {
            agent(m).years_in_town = 0;
        }
    }
}

void SimulationState::kill(AgentId id) {
    auto &a = agent(id);
    if (!a.alive) {
        return;
    }
    if (a.partner != kNoAgent && is_alive(a.partner)) {
        agent(a.partner).partner = kNoAgent;
    }
    a.partner = kNoAgent;
    leave_household(id);
    a.alive = false;
    a.hourly_wage = 0.0;
    --living_count_;
}

bool SimulationState::has_parent_in_household(const Agent &a) const {
    for (AgentId p : {a.mother, a.father}) {
        if (is_alive(p) && agent(p).household == a.household) {
            return true;
        }
    }
    return false;
}

bool SimulationState::has_adult(HouseholdId id) const {
    const auto &h = household(id);
    return std::any_of(h.members.begin(), h.members.end(),
                       [&](AgentId m) { return agent(m).adult(); });
}

void SimulationState::check_invariants(std::string_view phase) const {
    auto fail = [&](const std::string &what) {
        throw SimulationError("invariant violated after phase '" + std::string(phase) + "' in year " +
                              std::to_string(year) + ": " + what);
    };
    std::size_t counted = 0;
    std::map<AgentId, int> seen;
    for (const auto &h : households) {
        if (!h.active) {
            continue;
        }
        if (h.members.empty()) {
            fail("household " + std::to_string(h.id) + " is empty");
        }
        if (h.house == kNoHouse || world.house(h.house).occupant != h.id) {
            fail("household " + std::to_string(h.id) + " does not own its house");
        }
        if (world.house(h.house).town != h.town) {
            fail("household " + std::to_string(h.id) + " town mismatch");
        }
        for (AgentId m : h.members) {
            if (!is_alive(m)) {
                fail("dead agent " + std::to_string(m) + " in household");
            }
            if (agent(m).household != h.id) {
                fail("agent " + std::to_string(m) + " household back-reference mismatch");
            }
            if (++seen[m] > 1) {
                fail("agent " + std::to_string(m) + " in two households");
            }
            ++counted;
        }
    }
    if (counted != living_count_) {
        fail("household members do not partition the living population");
    }
    for (const auto &a : agents) {
        if (!a.alive) {
            continue;
        }
        if (a.age < 0) {
            fail("negative age");
        }
        if (a.partner != kNoAgent) {
            if (!is_alive(a.partner)) {
                fail("agent " + std::to_string(a.id) + " has a dead partner");
            }
            if (agent(a.partner).partner != a.id) {
                fail("asymmetric partnership at agent " + std::to_string(a.id));
            }
        }
        if ((a.hourly_wage > 0.0) != (a.status == Status::Employed)) {
            fail("agent " + std::to_string(a.id) + " wage/status mismatch");
        }
    }
    for (std::size_t i = 0; i < world.houses().size(); ++i) {
        const auto occ = world.houses()[i].occupant;
        if (occ != kNoHousehold &&
            (!household(occ).active || household(occ).house != static_cast<HouseId>(i))) {
            fail("house " + std::to_string(i) + " occupied by an inactive household");
        }
    }
}

void SimulationState::log(std::string_view phase, std::string_view detail) {
    if (!config || !config->log_events) {
        return;
    }
    nlohmann::json line{{"year", year}, {"phase", phase}};
    if (!detail.empty()) {
        line["detail"] = detail;
    }
    events.push_back(line.dump());
}

} // namespace caresim
