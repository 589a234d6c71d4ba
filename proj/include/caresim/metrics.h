#pragma once

#include "caresim/state.h"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace caresim {

struct CareTotals {
    double need = 0.0;
    double informal = 0.0;
    double formal = 0.0;
    double unmet = 0.0;
    int receivers = 0;
};

/// One year of output. Hours are weekly rates, money is annual. Ratios with
/// an empty denominator are NaN and written as NA.
struct MetricsRow {
    int year = 0;
    int population = 0;
    int households = 0;
    int employed = 0;
    int unemployed = 0;
    int retired = 0;

    CareTotals total;
    double state_funded_hours = 0.0;
    double per_recipient_informal = 0.0;
    double per_recipient_formal = 0.0;
    double per_recipient_unmet = 0.0;

    std::array<CareTotals, kCareLevels> by_level{};  // index 0 (None) stays empty
    std::array<CareTotals, kSesGroups> by_ses{};      // receiver's group

    std::array<double, 4> informal_by_distance{};
    std::array<double, 4> formal_by_distance{};

    double female_informal_share = 0.0;
    double female_mean_income = 0.0;
    double male_mean_income = 0.0;
    double income_ratio = 0.0;  // female over male

    double hospital_days = 0.0;
    double hospital_cost = 0.0;
    double hospital_cost_per_capita = 0.0;
    double policy_cost = 0.0;
    double tax_revenue = 0.0;
    double treasury_balance = 0.0;

    int births = 0;
    int deaths = 0;
    int marriages = 0;
    int divorces = 0;
    int adoptions = 0;
    int hires = 0;
    int fires = 0;
    int relocations = 0;
};

MetricsRow collect_metrics(const SimulationState &state);

/// Column names in output order.
std::vector<std::string> metrics_columns();

void write_metrics_header(std::ostream &out);
void write_metrics_row(std::ostream &out, const MetricsRow &row);
void write_metrics_csv(std::ostream &out, const std::vector<MetricsRow> &rows);

/// Shortest round-trip text for a value; NA for NaN.
std::string format_number(double v);

} // namespace caresim
