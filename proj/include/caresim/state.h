#pragma once

#include "caresim/config.h"
#include "caresim/ledger.h"
#include "caresim/rate_tables.h"
#include "caresim/rng.h"
#include "caresim/types.h"
#include "caresim/world.h"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace caresim {

struct YearCounters {
    int deaths = 0;
    int adoptions = 0;
    int births = 0;
    int divorces = 0;
    int marriages = 0;
    int hires = 0;
    int fires = 0;
    int relocations = 0;
    double hospital_days = 0.0;
    double hospital_cost = 0.0;  // annual
    double tax_revenue = 0.0;    // annual
    double policy_cost = 0.0;    // annual
};

struct Treasury {
    double revenue = 0.0;
    double policy_spending = 0.0;
    double balance() const noexcept { return revenue - policy_spending; }
    bool operator==(const Treasury &) const = default;
};

/// Everything one run owns. Agents and households are stored by id and
/// never erased, so ids stay valid after death or dissolution.
struct SimulationState {
    std::shared_ptr<const ScenarioConfig> config;
    std::shared_ptr<const RateTables> tables;

    int year = 0;
    std::vector<Agent> agents;
    std::vector<Household> households;
    WorldGrid world;
    RngStreams rng;
    Treasury treasury;
    CareLedger ledger;
    YearCounters counters;
    std::vector<std::string> events;

    const ScenarioConfig &cfg() const noexcept { return *config; }

    Agent &agent(AgentId id) { return agents.at(static_cast<std::size_t>(id)); }
    const Agent &agent(AgentId id) const { return agents.at(static_cast<std::size_t>(id)); }
    Household &household(HouseholdId id) { return households.at(static_cast<std::size_t>(id)); }
    const Household &household(HouseholdId id) const {
        return households.at(static_cast<std::size_t>(id));
    }

    /// Living agent ids, ascending.
    std::vector<AgentId> living() const;
    /// Active household ids, ascending.
    std::vector<HouseholdId> active_households() const;
    std::size_t population() const noexcept { return living_count_; }

    bool is_alive(AgentId id) const noexcept {
        return id >= 0 && static_cast<std::size_t>(id) < agents.size() &&
               agents[static_cast<std::size_t>(id)].alive;
    }

    AgentId add_agent(Agent agent);
    HouseholdId create_household(HouseId house);

    /// Moves an agent into a household, dissolving the old one if it empties.
    void join_household(AgentId agent, HouseholdId household);

    /// Moves an agent into a fresh household in the given house.
    HouseholdId move_to_new_house(AgentId agent, HouseId house);

    /// Moves a whole household to another house.
    void relocate_household(HouseholdId household, HouseId house);

    /// Marks the agent dead, removes it from its household and clears the
    /// partner link on the survivor.
    void kill(AgentId agent);

    bool has_parent_in_household(const Agent &a) const;
    bool has_adult(HouseholdId household) const;

    /// Throws SimulationError naming the phase on any broken cross-reference.
    void check_invariants(std::string_view phase) const;

    void log(std::string_view phase, std::string_view detail = {});

private:
    void leave_household(AgentId agent);
    std::size_t living_count_ = 0;
};

} // namespace caresim
