#include "caresim/economy.h"

#include "caresim/migration.h"

#include <algorithm>
#include <cmath>

namespace caresim {

double hourly_wage(const SalaryCurve &curve, double experience) noexcept {
    const double c = std::log(curve.initial_wage / curve.max_wage);
    return curve.max_wage * std::exp(c * std::exp(-curve.growth_rate * experience));
}

double update_experience(double experience, double worked_fraction, double discount) noexcept {
    return experience * (1.0 - discount) + worked_fraction;
}

double care_budget_share(double per_capita_income, double beta) noexcept {
    return 1.0 - std::exp(-beta * std::max(0.0, per_capita_income));
}

int education_level_for_exit_age(int age) noexcept {
    return std::clamp((age - 16) / 2, 0, 4);
}

SesGroup ses_for_exit_age(int age) {
    switch (age) {
    case 16: return SesGroup::D;
    case 18: return SesGroup::C2;
    case 20: return SesGroup::C1;
    case 22: return SesGroup::B;
    case 24: return SesGroup::A;
    default: break;
    }
    throw std::invalid_argument("education exit age must be one of 16, 18, 20, 22, 24");
}

int education_level(SesGroup g) noexcept { return ses_rank(g); }

double continuation_probability(const ScenarioConfig &c, double income, int parent_education,
                                int level, double care_hours) noexcept {
    const double z = c.education_income_weight * income +
                     c.education_gap_weight * std::max(0, parent_education - level) -
                     c.education_care_weight * care_hours;
    const double lift = std::max(0.0, std::tanh(z / 2.0));
    return c.education_floor + (c.education_ceiling - c.education_floor) * lift;
}

int parents_max_education(const SimulationState &s, const Agent &a) {
    int best = 0;
    for (AgentId p : {a.mother, a.father}) {
        if (p != kNoAgent) {
            best = std::max(best, s.agent(p).education);
        }
    }
    return best;
}

double available_income(const SimulationState &s, HouseholdId id) {
    const auto &h = s.household(id);
    if (h.members.empty()) {
        return 0.0;
    }
    const double disposable = h.employment_income * (1.0 - s.cfg().tax_rate) + h.pension_income;
    double spent = 0.0;
    if (const auto *sp = s.ledger.spend(id)) {
        spent = sp->net_spend;
    }
    return std::max(0.0, disposable - spent) / static_cast<double>(h.members.size());
}

EducationChoice education_decision(const SimulationState &s, const Agent &a, Rng &rng) {
    if (a.age >= 24) {
        return EducationChoice::EnterWorkforce;
    }
    const double p =
        continuation_probability(s.cfg(), available_income(s, a.household), parents_max_education(s, a),
                                 a.education, a.informal_supplied);
    return rng.bernoulli(p) ? EducationChoice::KeepStudying : EducationChoice::EnterWorkforce;
}

double final_income(const Agent &a, const ScenarioConfig &c) noexcept {
    const double wage = a.last_wage > 0.0 ? a.last_wage : c.salary[std::size_t(index_of(a.ses))].initial_wage;
    return wage * c.weekly_work_hours;
}

double pension(const Agent &a, const ScenarioConfig &c) noexcept {
    const double base = c.pension_rate * final_income(a, c);
    if (!a.ill_health_retirement) {
        return base;
    }
    const double max_years = static_cast<double>(c.retirement_age - c.min_working_age);
    double lost = static_cast<double>(std::max(0, a.lost_working_years));
    if (a.care_need == CareNeedLevel::Substantial || a.care_need == CareNeedLevel::Critical) {
        lost *= 0.5;
    }
    return base * std::max(0.0, 1.0 - lost / max_years);
}

double hire_probability(const ScenarioConfig &c, SesGroup ses, double u) noexcept {
    const double p = c.hire_floor + c.hire_base * c.hire_ses_multiplier[std::size_t(index_of(ses))] * (1.0 - u);
    return std::clamp(p, 0.0, 1.0);
}

double fire_probability(const ScenarioConfig &c, SesGroup ses, double u) noexcept {
    return std::clamp(c.fire_base * u * c.fire_ses_multiplier[std::size_t(index_of(ses))], 0.0, 1.0);
}

namespace {

bool lives_with_parents(const SimulationState &s, const Agent &a) {
    return a.partner == kNoAgent && s.has_parent_in_household(a);
}

MoveGroup job_move_group(const SimulationState &s, const Agent &a) {
    if (lives_with_parents(s, a)) {
        return MoveGroup::of_agents(s, {a.id});
    }
    return MoveGroup::of_household(s, a.household);
}

void set_employed(Agent &a, const ScenarioConfig &c) {
    a.status = Status::Employed;
    a.hourly_wage = hourly_wage(c.salary[std::size_t(index_of(a.ses))], a.experience);
    a.last_wage = a.hourly_wage;
    a.worked_fraction = a.leave_years > 0 ? 0.0 : 1.0;
    a.hired_this_year = true;
}

} // namespace

JobMarketEvents job_market_step(SimulationState &s, int year, Rng &rng) {
    const auto &c = s.cfg();
    const double discount = c.effective_experience_discount();
    JobMarketEvents ev;

    for (auto &a : s.agents) {
        if (!a.alive) {
            continue;
        }
        a.hired_this_year = false;
        a.job_offer_town = kNoTown;
        if (a.status == Status::Employed) {
            a.realized_income = a.hourly_wage * c.weekly_work_hours * a.worked_fraction;
            a.experience = update_experience(a.experience, a.worked_fraction, discount);
            a.hourly_wage = hourly_wage(c.salary[std::size_t(index_of(a.ses))], a.experience);
            a.last_wage = a.hourly_wage;
        } else {
            a.realized_income = 0.0;
            if (a.status == Status::Unemployed) {
                a.experience = update_experience(a.experience, 0.0, discount);
            }
        }
        if (a.leave_years > 0) {
            --a.leave_years;
        }
        a.worked_fraction = a.status == Status::Employed && a.leave_years == 0 ? 1.0 : 0.0;
    }

    const TownCensus census = TownCensus::build(s);
    for (AgentId id : s.living()) {
        auto &a = s.agent(id);
        if (a.status != Status::Employed && a.status != Status::Unemployed) {
            continue;
        }
        const double u = std::clamp(s.tables->unemployment.at(a.age, a.sex, a.ses, year), 0.0, 1.0);
        const TownId here = s.household(a.household).town;
        const double accept_base = c.cross_town_acceptance[std::size_t(index_of(a.ses))];
        if (a.status == Status::Unemployed) {
            if (!rng.keyed_bernoulli(hire_probability(c, a.ses, u), std::uint64_t(DrawTag::Hire), std::uint64_t(year), id)) {
                continue;
            }
            const TownId offer = rng.keyed_bernoulli(c.local_offer_prob, std::uint64_t(DrawTag::LocalOffer), std::uint64_t(year), id)
                                     ? here
                                     : s.world.random_town_by_density(rng);
            if (offer != here) {
                const double p = accept_base * move_gate(s, census, job_move_group(s, a), offer);
                if (!rng.keyed_bernoulli(p, std::uint64_t(DrawTag::HireAccept), std::uint64_t(year), id)) {
                    continue;
                }
                a.job_offer_town = offer;
            }
            set_employed(a, c);
            ev.hires.push_back(id);
        } else if (rng.keyed_bernoulli(fire_probability(c, a.ses, u), std::uint64_t(DrawTag::Fire), std::uint64_t(year), id)) {
            a.status = Status::Unemployed;
            a.hourly_wage = 0.0;
            a.worked_fraction = 0.0;
            ev.fires.push_back(id);
        } else if (rng.keyed_bernoulli(c.job_change_rate, std::uint64_t(DrawTag::JobChange), std::uint64_t(year), id)) {
            const TownId offer = s.world.random_town_by_density(rng);
            if (offer == here) {
                continue;
            }
            const double p = accept_base * move_gate(s, census, job_move_group(s, a), offer);
            if (rng.keyed_bernoulli(p, std::uint64_t(DrawTag::ChangeAccept), std::uint64_t(year), id)) {
                a.job_offer_town = offer;
                ev.job_changes.push_back(id);
            }
        }
    }
    s.counters.hires += static_cast<int>(ev.hires.size());
    s.counters.fires += static_cast<int>(ev.fires.size());
    return ev;
}

void update_household_finances(SimulationState &s) {
    const auto &c = s.cfg();
    for (auto &h : s.households) {
        if (!h.active) {
            continue;
        }
        double employment = 0.0;
        double pensions = 0.0;
        for (AgentId m : h.members) {
            auto &a = s.agent(m);
            if (a.status == Status::Employed) {
                employment += a.hourly_wage * c.weekly_work_hours * a.worked_fraction;
            } else if (a.status == Status::Retired) {
                a.pension = pension(a, c);
                pensions += a.pension;
            }
        }
        h.employment_income = employment;
        h.pension_income = pensions;
        const double disposable = employment * (1.0 - c.tax_rate) + pensions;
        h.per_capita_income = disposable / static_cast<double>(h.members.size());
        h.care_budget_share = care_budget_share(h.per_capita_income, c.care_budget_beta);
        h.care_budget = h.care_budget_share * disposable;
    }
}

TaxBill household_tax(double income, double spend, double rate, bool deduction) noexcept {
    TaxBill bill;
    const double full = rate * std::max(0.0, income);
    if (!deduction) {
        bill.tax = full;
        return bill;
    }
    bill.tax = rate * std::max(0.0, income - std::max(0.0, spend));
    bill.policy_cost = full - bill.tax;
    return bill;
}

bool deduction_active(const ScenarioConfig &c, int year) noexcept {
    return c.policy == Policy::TaxDeduction && year >= c.policy_year;
}

TaxResult collect_taxes(SimulationState &s, int year) {
    const auto &c = s.cfg();
    const bool deduction = deduction_active(c, year);
    TaxResult out;
    for (const auto &h : s.households) {
        if (!h.active) {
            continue;
        }
        double income = 0.0;
        for (AgentId m : h.members) {
            const auto &a = s.agent(m);
            if (a.status == Status::Employed) {
                income += a.hourly_wage * c.weekly_work_hours * a.worked_fraction;
            }
        }
        double spend = 0.0;
        if (const auto *sp = s.ledger.spend(h.id)) {
            spend = sp->formal_spend;
        }
        const auto bill = household_tax(income * 52.0, spend * 52.0, c.tax_rate, deduction);
        out.revenue += bill.tax;
        out.policy_cost += bill.policy_cost;
    }
    s.treasury.revenue += out.revenue;
    s.treasury.policy_spending += out.policy_cost;
    s.counters.tax_revenue += out.revenue;
    s.counters.policy_cost += out.policy_cost;
    return out;
}

} // namespace caresim
