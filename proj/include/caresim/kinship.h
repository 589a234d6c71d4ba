#pragma once

#include "caresim/state.h"

#include <array>
#include <vector>

namespace caresim {

inline constexpr int kKinshipDistances = 4;

/// Households related to one agent, each placed at its minimal distance:
/// 0 own household, 1 parents and non-coresident children, 2 grandparents,
/// grandchildren and siblings, 3 uncles, aunts, nephews and nieces.
struct KinshipNetwork {
    AgentId owner = kNoAgent;
    std::array<std::vector<HouseholdId>, kKinshipDistances> by_distance;  // each ascending

    /// Minimal distance of a household, or -1 when it is not in the network.
    int distance_of(HouseholdId household) const noexcept;
    std::size_t size() const noexcept;
};

struct KinEntry {
    HouseholdId household = kNoHousehold;
    int distance = 0;
};

KinshipNetwork build_kinship_network(const SimulationState &state, AgentId agent);

/// Union of the members' networks, each household at its minimal distance
/// to any member. Sorted by household id.
std::vector<KinEntry> household_kinship(const SimulationState &state, HouseholdId household);

/// Relatives of an agent at each genealogical degree, living or dead,
/// without the household filtering. Index 0 is unused.
std::array<std::vector<AgentId>, kKinshipDistances> relatives_by_degree(const SimulationState &state,
                                                                        AgentId agent);

} // namespace caresim
