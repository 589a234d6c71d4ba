#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace caresim {

using AgentId = std::int32_t;
using HouseholdId = std::int32_t;
using TownId = std::int32_t;
using HouseId = std::int32_t;

inline constexpr AgentId kNoAgent = -1;
inline constexpr HouseholdId kNoHousehold = -1;
inline constexpr TownId kNoTown = -1;
inline constexpr HouseId kNoHouse = -1;

enum class Sex : std::uint8_t { Male, Female };

/// Socioeconomic status groups, A highest. Category E is folded into C2 and D.
enum class SesGroup : std::uint8_t { A, B, C1, C2, D };
inline constexpr int kSesGroups = 5;
inline constexpr std::array<SesGroup, kSesGroups> kAllSes{SesGroup::A, SesGroup::B, SesGroup::C1,
                                                           SesGroup::C2, SesGroup::D};

enum class Status : std::uint8_t { Child, Teenager, Student, Employed, Unemployed, Retired };

enum class CareNeedLevel : std::uint8_t { None, Low, Moderate, Substantial, Critical };
inline constexpr int kCareLevels = 5;

enum class Policy : std::uint8_t { None, TaxDeduction, DirectFunding };

/// Weekly hours of care required at each need level.
constexpr double care_hours(CareNeedLevel level) noexcept {
    switch (level) {
    case CareNeedLevel::None: return 0.0;
    case CareNeedLevel::Low: return 8.0;
    case CareNeedLevel::Moderate: return 16.0;
    case CareNeedLevel::Substantial: return 32.0;
    case CareNeedLevel::Critical: return 80.0;
    }
    return 0.0;
}

constexpr int index_of(SesGroup g) noexcept { return static_cast<int>(g); }
constexpr int index_of(CareNeedLevel l) noexcept { return static_cast<int>(l); }
constexpr int index_of(Sex s) noexcept { return static_cast<int>(s); }

// 4 for A down to 0 for D, so larger means wealthier.
constexpr int ses_rank(SesGroup g) noexcept { return kSesGroups - 1 - index_of(g); }

constexpr SesGroup ses_from_index(int i) noexcept { return static_cast<SesGroup>(i); }

std::string_view to_string(SesGroup g) noexcept;
std::string_view to_string(Sex s) noexcept;
std::string_view to_string(Status s) noexcept;
std::string_view to_string(CareNeedLevel l) noexcept;
std::string_view to_string(Policy p) noexcept;

std::optional<SesGroup> parse_ses(std::string_view text) noexcept;
std::optional<Sex> parse_sex(std::string_view text) noexcept;
std::optional<Policy> parse_policy(std::string_view text) noexcept;

struct Agent {
    AgentId id = kNoAgent;
    Sex sex = Sex::Male;
    int age = 0;
    int birth_year = 0;
    SesGroup ses = SesGroup::C1;
    int education = 0;
    Status status = Status::Child;
    bool alive = true;

    double hourly_wage = 0.0;
    double last_wage = 0.0;  // last hourly wage held, kept through unemployment/retirement
    double experience = 0.0;
    double worked_fraction = 0.0;
    double realized_income = 0.0;  // weekly employment income earned in the current year
    int leave_years = 0;           // years of newborn leave remaining

    CareNeedLevel care_need = CareNeedLevel::None;
    double unmet_history = 0.0;
    double unmet_share_sum = 0.0;
    double unmet_share_weight = 0.0;
    double informal_supplied = 0.0;  // weekly informal hours supplied in the latest allocation

    bool ill_health_retirement = false;
    int lost_working_years = 0;
    double pension = 0.0;  // weekly

    HouseholdId household = kNoHousehold;
    AgentId mother = kNoAgent;
    AgentId father = kNoAgent;
    AgentId partner = kNoAgent;
    std::vector<AgentId> children;
    int years_in_town = 0;

    TownId job_offer_town = kNoTown;  // accepted offer awaiting relocation
    bool hired_this_year = false;

    bool dependent() const noexcept { return age < 16; }
    bool adult() const noexcept { return age >= 16; }
};

struct Household {
    HouseholdId id = kNoHousehold;
    std::vector<AgentId> members;
    TownId town = kNoTown;
    HouseId house = kNoHouse;
    bool active = true;

    double employment_income = 0.0;  // weekly
    double pension_income = 0.0;     // weekly
    double per_capita_income = 0.0;  // weekly, net of tax
    double care_budget_share = 0.0;
    double care_budget = 0.0;  // weekly currency allocated to care
};

/// Thrown when a phase leaves the simulation in an inconsistent state.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace caresim
