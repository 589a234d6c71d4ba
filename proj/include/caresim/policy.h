#pragma once

#include "caresim/metrics.h"
#include "caresim/state.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace caresim {

bool direct_funding_active(const ScenarioConfig &config, int year) noexcept;

struct DirectFunding {
    std::vector<AgentId> funded;
    double weekly_hours = 0.0;
    double weekly_cost = 0.0;
    double annual_cost = 0.0;
};

/// Critical-need agents get their whole need as state-funded formal care
/// from the policy year on; the annual cost is booked as policy cost.
DirectFunding apply_direct_funding(SimulationState &state, int year);

class IcerUndefined : public std::runtime_error {
public:
    IcerUndefined() : std::runtime_error("policy did not reduce unmet need; ICER undefined") {}
};

/// Per-run outcome: the metrics rows from the reporting start on.
struct ScenarioOutcome {
    std::string name;
    Policy policy = Policy::None;
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;

    const MetricsRow *row(int year) const noexcept;
};

/// Discounted policy cost over discounted unmet hours averted, summed over
/// [from_year, to_year]. Throws IcerUndefined unless the policy lowers unmet need.
double icer(const ScenarioOutcome &policy, const ScenarioOutcome &benchmark, int from_year,
            int to_year, double discount_rate);
double icer(const ScenarioOutcome &policy, const ScenarioOutcome &benchmark, const ScenarioConfig &config);

/// Sum of a per-year series discounted back to `from_year`.
double discounted_sum(const std::vector<double> &values, double discount_rate) noexcept;

struct Scenario {
    std::string name;
    ScenarioConfig config;
};

struct IcerRow {
    std::string scenario;
    std::uint64_t seed = 0;
    std::optional<double> icer;
};

struct IcerSummary {
    std::string scenario;
    std::optional<double> median;
    std::optional<double> min;
    std::optional<double> max;
    int undefined = 0;
};

struct SpilloverRow {
    std::string scenario;
    std::uint64_t seed = 0;
    double discounted_hospital_cost = 0.0;
    double delta_vs_benchmark = 0.0;
};

struct ComparisonReport {
    std::vector<ScenarioOutcome> outcomes;  // scenario-major, then seed order
    std::vector<IcerRow> icers;
    std::vector<IcerSummary> summaries;
    std::vector<SpilloverRow> spillover;

    const ScenarioOutcome *outcome(const std::string &scenario, std::uint64_t seed) const noexcept;
};

/// Name used for a policy in file names and reports.
std::string scenario_name(Policy p);

/// Scenarios differing from `base` only in the policy field.
std::vector<Scenario> policy_scenarios(const ScenarioConfig &base, const std::vector<Policy> &policies);

/// Runs every (scenario, seed) pair under common random numbers. Each seed
/// is simulated once up to the policy year and then branched per scenario,
/// which yields the same trajectories as independent runs. The first
/// scenario with Policy::None is the benchmark. Throws ConfigError if the
/// scenarios differ in anything but the policy. `workers` <= 1 runs serially.
ComparisonReport run_scenario_set(const std::vector<Scenario> &scenarios,
                                  const std::vector<std::uint64_t> &seeds,
                                  std::shared_ptr<const RateTables> tables, int workers = 1);

/// Median of a non-empty sample; the mean of the two middle values for even sizes.
double median(std::vector<double> values);

/// outcome_<scenario>_seed<seed>.csv per run, comparison.csv, icer.csv,
/// icer_summary.csv and spillover.csv. Returns the files written.
std::vector<std::filesystem::path> write_report(const ComparisonReport &report,
                                                const std::filesystem::path &dir);

} // namespace caresim
