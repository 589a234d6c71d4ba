#pragma once

#include "caresim/kinship.h"
#include "caresim/ledger.h"
#include "caresim/state.h"

#include <array>
#include <optional>
#include <vector>

namespace caresim {

/// Weekly informal hours a supplier can give, by status and kinship distance,
/// before quantum rounding. Children give nothing.
double supply_table_hours(Status status, int distance) noexcept;

/// Table value floored to a multiple of the quantum.
double supply_cap(Status status, int distance, int quantum_hours) noexcept;

std::optional<CareSource> source_for(Status status) noexcept;

/// Annual probability of moving up one need level:
/// base(age, sex, ses) * (1 + frailty * unmet_history), clamped to [0, 1].
double transition_probability(const Agent &agent, const RateTables &tables,
                              const ScenarioConfig &config, int year);

/// Draws the transition and returns the new level (never lower).
CareNeedLevel care_transition(const Agent &agent, const RateTables &tables,
                              const ScenarioConfig &config, int year, Rng &rng);

struct HospitalStay {
    double days = 0.0;
    double cost = 0.0;
};

/// days = base_days(level) * (1 + gamma * average discounted unmet share).
HospitalStay hospital_days(const Agent &agent, const ScenarioConfig &config) noexcept;

double average_unmet_share(const Agent &agent) noexcept;

struct SourceSupply {
    std::array<double, kCareSources> hours{};
    double total() const noexcept;
    double informal() const noexcept;
    double &operator[](CareSource s) noexcept { return hours[static_cast<std::size_t>(s)]; }
    double operator[](CareSource s) const noexcept { return hours[static_cast<std::size_t>(s)]; }
};

/// What one allocation iteration did, for tracing and tests.
struct AllocationStep {
    AgentId receiver = kNoAgent;
    HouseholdId household = kNoHousehold;
    CareSource source = CareSource::OutOfIncome;
    CareKind kind = CareKind::Informal;
    AgentId supplier = kNoAgent;
};

/// The quantum allocation loop for one year. Construction snapshots every
/// receiver with unmet need and its kinship network; each step moves one
/// quantum until no receiver with unmet need has any supply left.
class CareAllocator {
public:
    /// Agents in `state_funded` have their whole need met by the state and
    /// leave the pool.
    CareAllocator(SimulationState &state, int year, const std::vector<AgentId> &state_funded = {});

    /// Per-source residual hours a household can give this receiver now.
    SourceSupply available_supply(AgentId receiver, HouseholdId household) const;

    /// One iteration; nullopt once the loop has terminated.
    std::optional<AllocationStep> step(Rng &rng);

    void run(Rng &rng);

    /// Builds the ledger, writes back informal supply per agent and returns it.
    CareLedger finish();

    const KinshipNetwork &network(AgentId receiver) const;
    double unmet(AgentId receiver) const;
    std::size_t receiver_count() const noexcept { return receivers_.size(); }

private:
    struct Receiver {
        AgentId id = kNoAgent;
        CareNeedLevel level = CareNeedLevel::None;
        TownId town = kNoTown;
        double need = 0.0;
        double unmet = 0.0;
        double informal = 0.0;
        double formal = 0.0;
        double state_funded = 0.0;
        KinshipNetwork network;
    };
    struct Budget {
        double budget = 0.0;
        double left = 0.0;
        double refund_left = 0.0;
        double formal_spend = 0.0;
        double net_spend = 0.0;
        double forgone = 0.0;
    };
    struct Route {
        CareKind kind = CareKind::Formal;
        AgentId member = kNoAgent;  // time-off supplier for informal routes
        double unit_cost = 0.0;     // per hour charged to the budget
        double hours = 0.0;
    };

    const Receiver &receiver_at(AgentId id) const;
    SourceSupply supply_for(const Receiver &r, HouseholdId household, int distance) const;
    Route out_of_income_route(const Receiver &r, HouseholdId household, int distance) const;
    AgentId pick_member(const Receiver &r, HouseholdId household, int distance, CareSource source) const;
    double member_residual(const Receiver &r, const Agent &m, int distance) const;
    double used(AgentId id) const;

    void fenwick_set(std::size_t i, double w);
    std::size_t fenwick_find(double target) const;

    SimulationState &state_;
    int year_;
    double q_;
    bool deduction_;
    std::vector<Receiver> receivers_;  // ascending id
    std::vector<double> tree_;
    std::vector<double> weight_;
    double total_ = 0.0;  // unmet hours still in the pool; integral, so exact
    std::vector<double> used_;  // informal hours given, indexed by agent id
    std::vector<Budget> budgets_;  // indexed by household id
    std::vector<CareQuantum> quanta_;
    double state_funded_hours_ = 0.0;
    double state_funded_cost_ = 0.0;
};

CareLedger allocate_care(SimulationState &state, int year, Rng &rng,
                         const std::vector<AgentId> &state_funded = {});

/// Folds the year's unmet hours and unmet share into each receiver's
/// discounted history.
void record_unmet(SimulationState &state, const CareLedger &ledger);

/// Ill-health retirement on care-need onset for working-age agents.
void retire_for_ill_health(Agent &agent, const ScenarioConfig &config);

struct CareTransitionEvents {
    int transitions = 0;
    double hospital_days = 0.0;
    double hospital_cost = 0.0;
};

/// Phase 11: hospital use at the current level, then level transitions.
CareTransitionEvents care_transition_step(SimulationState &state, int year, Rng &rng);

} // namespace caresim
