#pragma once

#include "caresim/metrics.h"
#include "caresim/state.h"

#include <array>
#include <memory>
#include <string_view>
#include <vector>

namespace caresim {

/// The annual phases in execution order.
inline constexpr std::array<std::string_view, 11> kPhases{
    "deaths",          "adoptions",          "births",     "divorces",    "marriages",
    "care_allocation", "age_transitions",    "social_transitions", "job_market", "relocations",
    "care_transitions"};

/// Builds the world and the 1860 population. Throws ConfigError carrying the
/// validation report when the config is invalid.
SimulationState initialize(const ScenarioConfig &config, std::shared_ptr<const RateTables> tables);

/// Advances one year: increments the year, then runs the eleven phases.
/// Requires year < end year.
void step_year(SimulationState &state);

/// Steps until `last_year` and returns the metrics rows of years at or after
/// the reporting start.
std::vector<MetricsRow> run_until(SimulationState &state, int last_year);

/// initialize + run_until(end year).
std::vector<MetricsRow> run_simulation(const ScenarioConfig &config,
                                       std::shared_ptr<const RateTables> tables);

/// Phase 7: ageing and life-stage status changes.
void age_transitions(SimulationState &state);

/// Phase 8: education checkpoints.
void social_transitions(SimulationState &state, Rng &rng);

} // namespace caresim
