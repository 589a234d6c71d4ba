#pragma once

#include "caresim/care.h"
#include "caresim/config.h"
#include "caresim/engine.h"
#include "caresim/rate_tables.h"
#include "caresim/state.h"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace caresim::test {

/// Synthetic tables for the default config, built once.
std::shared_ptr<const RateTables> default_tables();

/// Every table a single constant rate.
struct FlatRates {
    double mortality = 0.0;
    double fertility = 0.0;
    double divorce = 0.0;
    double unemployment = 0.1;
    double onset = 0.0;
    double progression = 0.0;
};
std::shared_ptr<const RateTables> flat_tables(const FlatRates &rates);

/// Defaults with SES and care mortality modifiers neutralised.
ScenarioConfig neutral_config();

/// A hand-built state: towns in one row of the grid, three-bedroom houses.
class TinyWorld {
public:
    explicit TinyWorld(int towns = 2, int houses_per_town = 12, ScenarioConfig config = neutral_config(),
                       std::shared_ptr<const RateTables> tables = default_tables());

    HouseholdId home(TownId town);
    AgentId add(HouseholdId household, int age, Status status, Sex sex = Sex::Female,
                SesGroup ses = SesGroup::C1);
    AgentId worker(HouseholdId household, double wage, Sex sex = Sex::Female, int age = 40);
    void parent(AgentId child, AgentId mother, AgentId father = kNoAgent);
    void couple(AgentId a, AgentId b);
    void need(AgentId agent, CareNeedLevel level);
    void budget(HouseholdId household, double weekly);

    SimulationState s;
};

/// Upper tail of the chi-square statistic of observed counts against
/// expected probabilities.
double chi_square_p(const std::vector<double> &observed, const std::vector<double> &probabilities);

std::filesystem::path source_dir();
std::filesystem::path golden_dir();

/// Compares text with tests/golden/<name>; writes the file instead when
/// CARESIM_UPDATE_GOLDEN is set. Returns an error message on mismatch.
std::optional<std::string> match_golden(const std::string &name, const std::string &text);

std::string read_text(const std::filesystem::path &path);

/// Allocation outcome: per receiver (informal, formal) hours, then per
/// supplier informal hours. Ordered by id.
struct AllocationOutcome {
    std::vector<std::pair<AgentId, std::pair<int, int>>> receivers;
    std::vector<std::pair<AgentId, int>> suppliers;
    auto operator<=>(const AllocationOutcome &) const = default;
};

AllocationOutcome outcome_of(const CareLedger &ledger);

/// Household -> minimal kinship distance for one agent, derived from
/// generation gaps to common ancestors rather than relative lists.
std::map<HouseholdId, int> kin_distances(const SimulationState &state, AgentId owner);

/// Exact outcome distribution of one year's allocation, by enumerating every
/// sampling path. Works from the raw state, not from CareAllocator.
std::map<AllocationOutcome, double> enumerate_allocation(const SimulationState &state, int year);

/// Small allocation instance: at most three receivers and three households.
TinyWorld random_instance(std::uint64_t seed, bool deduction);

} // namespace caresim::test
