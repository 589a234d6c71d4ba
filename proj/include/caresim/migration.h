#pragma once

#include "caresim/kinship.h"
#include "caresim/state.h"

#include <array>
#include <optional>
#include <vector>

namespace caresim {

/// R = K * sum over movers of years_in_town^p.
double relocation_cost(const SimulationState &state, const std::vector<AgentId> &movers, double k,
                       double p);
double relocation_cost(const SimulationState &state, HouseholdId household, double k, double p);

/// (1 - g) * sum over kin households in the town of exp(-alpha d) * members,
/// not counting the movers themselves.
double care_attraction(const SimulationState &state, const std::vector<KinEntry> &kin,
                       const std::vector<AgentId> &movers, TownId town, double alpha, double g);
double care_attraction(const SimulationState &state, HouseholdId household, TownId town);

/// Living population per town and SES group, for homophily scores.
struct TownCensus {
    std::vector<std::array<int, kSesGroups>> counts;
    std::vector<int> totals;

    static TownCensus build(const SimulationState &state);
    /// Share of the town's population in the group; 0 for an empty town.
    double homophily(TownId town, SesGroup ses) const noexcept;
};

/// A group of agents considering a move together.
struct MoveGroup {
    std::vector<AgentId> movers;
    std::vector<KinEntry> kin;  // union of the movers' networks
    SesGroup ses = SesGroup::C1;
    TownId from = kNoTown;

    static MoveGroup of_household(const SimulationState &state, HouseholdId household);
    static MoveGroup of_agents(const SimulationState &state, std::vector<AgentId> movers);
};

/// logistic(bias + w_att * d_attraction + w_hom * d_homophily - w_cost * R).
double move_gate(const SimulationState &state, const TownCensus &census, const MoveGroup &group,
                 TownId to);

struct DestinationChoice {
    std::vector<TownId> towns;
    std::vector<double> weights;  // vacancy share times gate, unnormalised
    double move_probability = 0.0;  // vacancy-weighted mean gate
};

DestinationChoice evaluate_destinations(const SimulationState &state, const TownCensus &census,
                                        const MoveGroup &group, const std::vector<TownId> &candidates);

/// Town and vacant house for a move. With `forced` the logistic gate only
/// shapes the destination; otherwise the group may stay (nullopt). Full
/// destinations fall back to the nearest town with a vacancy.
std::optional<HouseId> choose_destination(const SimulationState &state, const TownCensus &census,
                                          const MoveGroup &group,
                                          const std::vector<TownId> &candidates, bool forced,
                                          Rng &rng);

/// Vacant house in the town, or in the nearest town with one. Throws
/// SimulationError when the map is full.
HouseId vacant_house_near(const SimulationState &state, TownId town, Rng &rng);

/// Move-in probabilities into each child household, proportional to the care
/// hours it supplied in the latest allocation. Sorted by household id.
std::vector<std::pair<HouseholdId, double>> retiree_move_probabilities(const SimulationState &state,
                                                                        AgentId retiree);
std::optional<HouseholdId> retiree_move_in(SimulationState &state, AgentId retiree, Rng &rng);

enum class IndependenceTrigger { None, Partnership, OutOfTownJob, InTownJob };

/// Leaves the parental household when triggered; in-town jobs trigger a move
/// with the configured probability. Returns the new household.
std::optional<HouseholdId> independence_move(SimulationState &state, AgentId agent,
                                             IndependenceTrigger trigger, TownId town, Rng &rng);

struct RelocationEvents {
    int job_moves = 0;
    int independence_moves = 0;
    int size_moves = 0;
    int retiree_moves = 0;
    int total() const noexcept { return job_moves + independence_moves + size_moves + retiree_moves; }
};

/// The annual relocation phase.
RelocationEvents relocation_step(SimulationState &state, Rng &rng);

/// Couple co-location after a partnership forms.
void colocate_couple(SimulationState &state, const TownCensus &census, AgentId male,
                     AgentId female, Rng &rng);

/// Divorced male moves to a new house in a density-weighted random town.
HouseholdId divorce_move(SimulationState &state, AgentId male, Rng &rng);

} // namespace caresim
