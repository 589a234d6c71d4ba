#pragma once

#include "caresim/types.h"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace caresim {

/// Gompertz salary curve: hourly wage as a function of discounted experience.
struct SalaryCurve {
    double initial_wage = 0.0;
    double max_wage = 0.0;
    double growth_rate = 0.0;

    bool operator==(const SalaryCurve &) const = default;
};

/// Gompertz-Makeham hazard A + B * exp(C * age).
struct GompertzMakeham {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    bool operator==(const GompertzMakeham &) const = default;
};

struct ScenarioConfig {
    // sim
    std::uint64_t seed = 1;
    int start_year = 1860;
    int census_year = 1951;
    int projection_year = 2009;
    int policy_year = 2020;
    int end_year = 2040;
    int reporting_start_year = 1990;
    int initial_population = 2600;
    bool check_invariants = false;
    bool log_events = false;

    // world
    int total_houses = 12000;
    std::vector<double> density_weights;  // row-major, kGridRows x kGridCols
    int min_bedrooms = 1;
    int max_bedrooms = 4;
    double size_move_prob = 0.3;

    // init
    double couple_fraction = 0.7;
    std::vector<double> age_pyramid;  // weights per 5-year band starting at age 0
    std::array<double, kSesGroups> ses_shares{0.04, 0.22, 0.29, 0.25, 0.20};

    // mortality
    GompertzMakeham gm_male{0.008, 0.00006, 0.092};
    GompertzMakeham gm_female{0.007, 0.00004, 0.094};
    double lc_k0 = 0.0;
    double lc_drift = -0.008;
    std::array<double, kSesGroups> mortality_ses_modifier{0.8, 0.9, 1.0, 1.1, 1.2};
    std::array<double, kCareLevels> mortality_care_modifier{1.0, 1.1, 1.25, 1.5, 2.0};

    // fertility
    int fertile_min_age = 16;
    int fertile_max_age = 45;
    int newborn_leave_years = 1;

    // partnership
    std::vector<double> market_entry_rates;  // per 5-year band from age 16, males
    double partner_ses_weight = 0.5;
    double partner_age_weight = 0.25;
    double partner_distance_weight = 0.6;
    double male_higher_asymmetry = 0.5;

    // economy
    double weekly_work_hours = 40.0;
    double tax_rate = 0.2;
    double pension_rate = 0.6;
    int retirement_age = 65;
    int min_working_age = 16;
    double experience_discount = -1.0;  // negative: use discount_rate
    std::array<SalaryCurve, kSesGroups> salary{
        SalaryCurve{16.0, 48.0, 0.12}, SalaryCurve{13.0, 34.0, 0.15}, SalaryCurve{10.0, 24.0, 0.18},
        SalaryCurve{8.5, 17.0, 0.22}, SalaryCurve{7.0, 12.0, 0.25}};
    double education_floor = 0.15;
    double education_ceiling = 0.9;
    double education_income_weight = 0.004;
    double education_gap_weight = 0.8;
    double education_care_weight = 0.05;
    double hire_base = 0.8;
    double hire_floor = 0.0;
    double fire_base = 1.0;
    std::array<double, kSesGroups> hire_ses_multiplier{1.0, 0.95, 0.9, 0.85, 0.8};
    std::array<double, kSesGroups> fire_ses_multiplier{0.6, 0.8, 1.0, 1.2, 1.4};
    double local_offer_prob = 0.75;
    double job_change_rate = 0.1;
    std::array<double, kSesGroups> cross_town_acceptance{0.6, 0.5, 0.4, 0.3, 0.2};

    // care
    int quantum_hours = 4;
    double care_price = 15.0;
    double kinship_decay = 0.5;
    double care_budget_beta = 0.00032;
    double unmet_frailty = 0.01;
    std::array<double, kCareLevels - 1> progression_multiplier{1.0, 1.0, 1.0, 1.0};
    std::array<double, kCareLevels> hospital_base_days{0.0, 0.5, 1.0, 3.0, 6.0};
    double hospital_unmet_gamma = 2.0;
    double hospital_cost_per_day = 400.0;

    // migration
    double relocation_scale = 0.3;
    double relocation_exponent = 0.5;
    double move_gate_bias = 1.0;
    double move_cost_weight = 1.0;
    double move_attraction_weight = 0.3;
    double move_homophily_weight = 1.0;
    double independence_prob = 0.3;
    double retiree_move_scale = 0.3;

    // policy
    Policy policy = Policy::None;
    double gov_care_share = 0.0;
    double discount_rate = 0.035;
    bool discount_icer = true;

    // tables
    std::string tables_dir = "tables";

    double effective_experience_discount() const noexcept {
        return experience_discount < 0.0 ? discount_rate : experience_discount;
    }

    bool operator==(const ScenarioConfig &) const = default;

    static ScenarioConfig defaults();
};

inline constexpr int kGridRows = 12;
inline constexpr int kGridCols = 8;
inline constexpr int kMaxHousesPerTown = 1225;
/// Synthetic population is roughly 1:10,000 of the UK; informational only.
inline constexpr double kPopulationScale = 1.0 / 10000.0;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered list of human-readable violations; empty means valid.
struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::string to_string() const;
};

ValidationReport validate_config(const ScenarioConfig &config);

/// Parses flat `namespace.key = value` text. Unknown keys and malformed values
/// throw ConfigError naming the line.
ScenarioConfig parse_config(const std::string &text);
ScenarioConfig load_config(const std::filesystem::path &path);

/// Canonical text form: every key, fixed order, round-trips through parse_config.
std::string dump_config(const ScenarioConfig &config);

/// Key/value view of dump_config, used to diff scenario configurations.
std::map<std::string, std::string> config_entries(const ScenarioConfig &config);

} // namespace caresim
