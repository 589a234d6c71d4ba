#pragma once

#include "caresim/state.h"

#include <utility>
#include <vector>

namespace caresim {

enum class MortalityRegime { GompertzMakeham, Table, LeeCarter };

MortalityRegime mortality_regime(const ScenarioConfig &config, int year) noexcept;

/// 1 - exp(-(A + B exp(C age))).
double gompertz_makeham_probability(const GompertzMakeham &gm, int age) noexcept;

/// Mean path of the Lee-Carter index: k0 + drift * (year - projection year).
double lee_carter_k(const ScenarioConfig &config, int year) noexcept;

/// Regime probability before the SES and care modifiers.
double base_mortality(int age, Sex sex, int year, const RateTables &tables,
                      const ScenarioConfig &config);

/// Annual death probability including SES and care-need modifiers, in [0, 1].
double mortality_probability(const Agent &agent, int year, const RateTables &tables,
                             const ScenarioConfig &config);

std::vector<AgentId> apply_deaths(SimulationState &state, int year, Rng &rng);

/// Dependents left in adult-free households move to the nearest kin
/// household with an adult, else to a random couple household.
std::vector<std::pair<AgentId, HouseholdId>> apply_adoptions(SimulationState &state, Rng &rng);

std::vector<AgentId> apply_births(SimulationState &state, int year, Rng &rng);

/// Unnormalised match weight
/// exp(-w_s ses*) * exp(-w_a |age diff|) * exp(-w_g grid distance),
/// with ses* shrunk by the asymmetry factor when the male ranks higher.
double partnership_weight(const ScenarioConfig &config, const Agent &male, const Agent &female,
                          int grid_distance) noexcept;

/// Probability that an eligible single male enters the market this year.
double market_entry_probability(const ScenarioConfig &config, int age) noexcept;

/// True when the two are too closely related to partner.
bool close_kin(const SimulationState &state, AgentId a, AgentId b);

std::vector<std::pair<AgentId, AgentId>> form_partnerships(SimulationState &state, int year, Rng &rng);

std::vector<std::pair<AgentId, AgentId>> apply_divorces(SimulationState &state, int year, Rng &rng);

} // namespace caresim
