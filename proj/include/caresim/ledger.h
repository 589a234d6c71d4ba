#pragma once

#include "caresim/types.h"

#include <optional>
#include <string>
#include <vector>

namespace caresim {

/// The six care sources of a supplying household: five informal status
/// categories plus the household's out-of-income budget.
enum class CareSource : std::uint8_t { Teenager, Student, Employed, Unemployed, Retired, OutOfIncome };
inline constexpr int kCareSources = 6;

enum class CareKind : std::uint8_t { Informal, Formal };

std::string_view to_string(CareSource s) noexcept;

struct CareQuantum {
    AgentId receiver = kNoAgent;
    HouseholdId supplier_household = kNoHousehold;
    AgentId supplier_agent = kNoAgent;  // kNoAgent for purchased formal care
    CareSource source = CareSource::OutOfIncome;
    CareKind kind = CareKind::Informal;
    int distance = 0;  // kinship distance of the supplying household
    double hours = 0.0;
    double cost = 0.0;  // gross price paid; 0 for informal care
};

struct ReceiverSummary {
    AgentId id = kNoAgent;
    CareNeedLevel level = CareNeedLevel::None;
    double need = 0.0;
    double informal = 0.0;
    double formal = 0.0;  // includes state-funded hours
    double state_funded = 0.0;
    double unmet = 0.0;
};

struct SupplierSummary {
    AgentId id = kNoAgent;
    double informal = 0.0;
};

struct HouseholdSpend {
    HouseholdId id = kNoHousehold;
    double budget = 0.0;         // weekly care budget at the start of allocation
    double formal_spend = 0.0;   // gross weekly spend on formal care
    double net_spend = 0.0;      // out-of-pocket: gross spend less any tax refund, plus forgone wages
    double forgone_wages = 0.0;  // weekly wages given up for out-of-income informal care
};

/// One year's record of care transfers. Hours are weekly rates.
struct CareLedger {
    int year = 0;
    std::vector<CareQuantum> quanta;
    std::vector<ReceiverSummary> receivers;  // ascending id
    std::vector<SupplierSummary> suppliers;  // ascending id
    std::vector<HouseholdSpend> spends;      // ascending id, households with a budget or spend
    double state_funded_hours = 0.0;
    double state_funded_cost = 0.0;  // weekly

    const ReceiverSummary *receiver(AgentId id) const noexcept;
    const HouseholdSpend *spend(HouseholdId id) const noexcept;

    /// Hours delivered from a given household to a receiver.
    double hours_from(HouseholdId household, AgentId receiver) const noexcept;
};

/// Checks the bookkeeping identities: informal + formal + unmet = need per
/// receiver, summaries equal the aggregation of quanta, quantum granularity,
/// formal quanta carry positive cost. Returns the first violation.
std::optional<std::string> verify_ledger(const CareLedger &ledger, double quantum_hours);

} // namespace caresim
