#pragma once

#include "caresim/state.h"

#include <vector>

namespace caresim {

/// w = F * exp(c * exp(-r t)), c = ln(I / F).
double hourly_wage(const SalaryCurve &curve, double experience) noexcept;

/// t' = t (1 - discount) + worked_fraction.
double update_experience(double experience, double worked_fraction, double discount) noexcept;

/// 1 - exp(-beta x).
double care_budget_share(double per_capita_income, double beta) noexcept;

/// Education level reached when leaving school at a given age, 0 at 16 up to 4 at 24.
int education_level_for_exit_age(int age) noexcept;
/// 16 -> D, 18 -> C2, 20 -> C1, 22 -> B, 24 -> A.
SesGroup ses_for_exit_age(int age);
int education_level(SesGroup g) noexcept;

/// Continuation probability at an education checkpoint:
/// floor + (ceiling - floor) * max(0, tanh(z / 2)),
/// z = w_inc * income + w_gap * max(0, parent_education - level) - w_care * care_hours.
double continuation_probability(const ScenarioConfig &config, double per_capita_available_income,
                                int parent_education, int level, double care_hours) noexcept;

enum class EducationChoice { KeepStudying, EnterWorkforce };

/// Highest education level among the agent's parents, 0 when unknown.
int parents_max_education(const SimulationState &state, const Agent &agent);

/// Per-capita household income net of tax and of this year's care spending.
double available_income(const SimulationState &state, HouseholdId household);

EducationChoice education_decision(const SimulationState &state, const Agent &agent, Rng &rng);

/// Weekly full-time income the pension is proportional to: the last wage
/// held, or the SES starting wage for agents never employed.
double final_income(const Agent &agent, const ScenarioConfig &config) noexcept;

/// Weekly pension. Ill-health retirees lose a share lost/max of the base,
/// halved for substantial and critical need.
double pension(const Agent &agent, const ScenarioConfig &config) noexcept;

double hire_probability(const ScenarioConfig &config, SesGroup ses, double unemployment) noexcept;
double fire_probability(const ScenarioConfig &config, SesGroup ses, double unemployment) noexcept;

struct JobMarketEvents {
    std::vector<AgentId> hires;
    std::vector<AgentId> fires;
    std::vector<AgentId> job_changes;  // accepted offers in another town
};

/// Hires, fires and cross-town offers, then experience and wage updates
/// using the fraction of the year actually worked.
JobMarketEvents job_market_step(SimulationState &state, int year, Rng &rng);

/// Weekly incomes, per-capita income and care budget of every household.
void update_household_finances(SimulationState &state);

struct TaxBill {
    double tax = 0.0;
    double policy_cost = 0.0;  // revenue forgone through the deduction
};

/// Flat tax on employment income; with the deduction the base is reduced by
/// care spending, floored at zero.
TaxBill household_tax(double employment_income, double care_spend, double rate, bool deduction) noexcept;

struct TaxResult {
    double revenue = 0.0;      // annual
    double policy_cost = 0.0;  // annual
};

/// Annual taxes from the realised employment income and the care ledger.
TaxResult collect_taxes(SimulationState &state, int year);

/// True when the tax deduction is in force for the year.
bool deduction_active(const ScenarioConfig &config, int year) noexcept;

} // namespace caresim
