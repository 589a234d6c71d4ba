#include "caresim/engine.h"

#include "caresim/care.h"
#include "caresim/demography.h"
#include "caresim/economy.h"
#include "caresim/migration.h"
#include "caresim/policy.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace caresim {

namespace {

int draw_age(const ScenarioConfig &c, Rng &rng) {
    const std::size_t band = rng.weighted_index(c.age_pyramid);
    return static_cast<int>(std::min(band, c.age_pyramid.size() - 1)) * 5 + static_cast<int>(rng.index(5));
}

SesGroup draw_ses(const ScenarioConfig &c, Rng &rng) {
    const std::size_t i = rng.weighted_index(c.ses_shares);
    return ses_from_index(static_cast<int>(std::min<std::size_t>(i, kSesGroups - 1)));
}

double experience_after(int years, double discount) {
    if (years <= 0) {
        return 0.0;
    }
    if (discount <= 0.0) {
        return years;
    }
    return (1.0 - std::pow(1.0 - discount, years)) / discount;
}

Status status_for_age(int age) {
    if (age < 13) {
        return Status::Child;
    }
    if (age < 16) {
        return Status::Teenager;
    }
    return Status::Unemployed;
}

HouseholdId place_household(SimulationState &s, Rng &rng) {
    const TownId town = s.world.random_town_by_density(rng);
    return s.create_household(vacant_house_near(s, town, rng));
}

void check_dependents(const SimulationState &s, std::string_view phase) {
    for (const auto &h : s.households) {
        if (h.active && !s.has_adult(h.id)) {
            throw SimulationError("invariant violated after phase '" + std::string(phase) + "' in year " +
                                  std::to_string(s.year) + ": household " + std::to_string(h.id) +
                                  " has dependents but no adult");
        }
    }
}

} // namespace

SimulationState initialize(const ScenarioConfig &config, std::shared_ptr<const RateTables> tables) {
    const auto report = validate_config(config);
    if (!report.ok()) {
        throw ConfigError(report.to_string());
    }
    if (!tables) {
        throw ConfigError("rate tables missing");
    }
    tables->validate(config);

    SimulationState s;
    s.config = std::make_shared<const ScenarioConfig>(config);
    s.tables = std::move(tables);
    s.year = config.start_year;
    s.rng = RngStreams(config.seed);
    Rng &rng = s.rng[Stream::Init];
    s.world = WorldGrid::build(config, rng);

    const double discount = config.effective_experience_discount();
    std::vector<Agent> people(static_cast<std::size_t>(config.initial_population));
    for (auto &a : people) {
        a.sex = rng.bernoulli(0.5) ? Sex::Female : Sex::Male;
        a.age = draw_age(config, rng);
        a.birth_year = config.start_year - a.age;
        a.ses = draw_ses(config, rng);
        a.education = a.age >= 16 ? ses_rank(a.ses) : 0;
        a.status = status_for_age(a.age);
        if (a.age >= config.retirement_age) {
            a.status = Status::Retired;
        }
        const int worked = std::clamp(a.age, 16, config.retirement_age) - 16;
        a.experience = experience_after(worked, discount);
        const auto &curve = config.salary[std::size_t(index_of(a.ses))];
        if (a.age >= 16) {
            a.last_wage = hourly_wage(curve, a.experience);
        }
        if (a.status == Status::Unemployed) {
            const double u = s.tables->unemployment.at(a.age, a.sex, a.ses, config.start_year);
            if (!rng.bernoulli(u)) {
                a.status = Status::Employed;
                a.hourly_wage = a.last_wage;
                a.worked_fraction = 1.0;
            }
        }
        a.years_in_town = static_cast<int>(rng.index(static_cast<std::size_t>(std::min(a.age, 20) + 1)));
    }

    std::vector<std::size_t> men;
    std::vector<std::size_t> women;
    std::vector<std::size_t> children;
    for (std::size_t i = 0; i < people.size(); ++i) {
        if (people[i].age < 16) {
            children.push_back(i);
        } else if (people[i].age >= 18) {
            (people[i].sex == Sex::Male ? men : women).push_back(i);
        }
    }
    rng.shuffle(men);
    rng.shuffle(women);
    const std::size_t couples = static_cast<std::size_t>(
        std::floor(config.couple_fraction * static_cast<double>(std::min(men.size(), women.size()))));
    std::vector<std::size_t> hm(men.begin(), men.begin() + static_cast<std::ptrdiff_t>(couples));
    std::vector<std::size_t> hw(women.begin(), women.begin() + static_cast<std::ptrdiff_t>(couples));
    auto by_age = [&](std::size_t a, std::size_t b) {
        return people[a].age != people[b].age ? people[a].age < people[b].age : a < b;
    };
    std::sort(hm.begin(), hm.end(), by_age);
    std::sort(hw.begin(), hw.end(), by_age);

    // Household assignment by index into `people`.
    std::vector<int> home(people.size(), -1);
    std::vector<std::size_t> couple_women;
    int next_home = 0;
    for (std::size_t k = 0; k < couples; ++k) {
        home[hm[k]] = next_home;
        home[hw[k]] = next_home;
        couple_women.push_back(hw[k]);
        ++next_home;
    }
    for (std::size_t i = 0; i < people.size(); ++i) {
        if (home[i] < 0 && people[i].age >= 16) {
            home[i] = next_home++;
        }
    }
    std::vector<int> mother_of(people.size(), -1);
    for (std::size_t c : children) {
        std::vector<std::size_t> fits;
        for (std::size_t w : couple_women) {
            const int gap = people[w].age - people[c].age;
            if (gap >= config.fertile_min_age && gap <= config.fertile_max_age) {
                fits.push_back(w);
            }
        }
        std::size_t mother = 0;
        if (!fits.empty()) {
            mother = fits[rng.index(fits.size())];
            mother_of[c] = static_cast<int>(mother);
        } else if (!couple_women.empty()) {
            mother = couple_women[rng.index(couple_women.size())];
        } else {
            // No couples at all: the child heads nothing, so give it a lone adult's home.
            std::vector<std::size_t> adults;
            for (std::size_t i = 0; i < people.size(); ++i) {
                if (people[i].age >= 16) {
                    adults.push_back(i);
                }
            }
            if (adults.empty()) {
                throw ConfigError("initial population has children but no adults");
            }
            mother = adults[rng.index(adults.size())];
        }
        home[c] = home[mother];
    }

    std::vector<HouseholdId> household_of(static_cast<std::size_t>(next_home), kNoHousehold);
    for (auto &h : household_of) {
        h = place_household(s, rng);
    }
    std::vector<AgentId> ids(people.size(), kNoAgent);
    for (std::size_t i = 0; i < people.size(); ++i) {
        people[i].household = household_of[std::size_t(home[i])];
        ids[i] = s.add_agent(people[i]);
    }
    for (std::size_t k = 0; k < couples; ++k) {
        s.agent(ids[hm[k]]).partner = ids[hw[k]];
        s.agent(ids[hw[k]]).partner = ids[hm[k]];
    }
    for (std::size_t c : children) {
        if (mother_of[c] < 0) {
            continue;
        }
        const AgentId mom = ids[std::size_t(mother_of[c])];
        const AgentId dad = s.agent(mom).partner;
        auto &child = s.agent(ids[c]);
        child.mother = mom;
        child.father = dad;
        child.ses = std::min(s.agent(mom).ses, s.agent(dad).ses);
        s.agent(mom).children.push_back(ids[c]);
        s.agent(dad).children.push_back(ids[c]);
    }
    for (auto &a : s.agents) {
        if (a.status == Status::Retired) {
            a.pension = pension(a, config);
        }
    }
    if (config.check_invariants) {
        s.check_invariants("initialize");
        check_dependents(s, "initialize");
    }
    return s;
}

void age_transitions(SimulationState &s) {
    const auto &c = s.cfg();
    for (auto &a : s.agents) {
        if (!a.alive) {
            continue;
        }
        ++a.age;
        ++a.years_in_town;
        if (a.status == Status::Child && a.age >= 13) {
            a.status = Status::Teenager;
        }
        if (a.status == Status::Teenager && a.age >= 16) {
            a.status = Status::Student;
            a.education = 0;
            if (a.care_need != CareNeedLevel::None) {
                retire_for_ill_health(a, c);
            }
        }
        if (a.age >= c.retirement_age &&
            (a.status == Status::Employed || a.status == Status::Unemployed || a.status == Status::Student)) {
            a.status = Status::Retired;
            a.hourly_wage = 0.0;
            a.worked_fraction = 0.0;
            a.pension = pension(a, c);
        }
    }
}

void social_transitions(SimulationState &s, Rng &rng) {
    for (AgentId id : s.living()) {
        auto &a = s.agent(id);
        if (a.status != Status::Student || a.age < 16 || a.age % 2 != 0 || a.age > 24) {
            continue;
        }
        const auto choice = education_decision(s, a, rng);
        a.education = education_level_for_exit_age(a.age);
        if (choice == EducationChoice::EnterWorkforce) {
            a.ses = ses_for_exit_age(a.age);
            a.status = Status::Unemployed;
            a.experience = 0.0;
        }
    }
}

void step_year(SimulationState &s) {
    const auto &c = s.cfg();
    if (s.year >= c.end_year) {
        throw SimulationError("cannot step past the end year " + std::to_string(c.end_year));
    }
    ++s.year;
    const int year = s.year;
    s.counters = {};
    Rng &demo = s.rng[Stream::Demography];
    Rng &econ = s.rng[Stream::Economy];
    Rng &care = s.rng[Stream::Care];
    Rng &move = s.rng[Stream::Migration];
    Rng &health = s.rng[Stream::Health];

    auto done = [&](std::size_t phase, std::string detail) {
        s.log(kPhases[phase], detail);
        if (c.check_invariants) {
            s.check_invariants(kPhases[phase]);
            if (phase >= 1) {
                check_dependents(s, kPhases[phase]);
            }
        }
    };

    done(0, "count=" + std::to_string(apply_deaths(s, year, demo).size()));
    done(1, "count=" + std::to_string(apply_adoptions(s, demo).size()));
    done(2, "count=" + std::to_string(apply_births(s, year, demo).size()));
    done(3, "count=" + std::to_string(apply_divorces(s, year, demo).size()));
    done(4, "count=" + std::to_string(form_partnerships(s, year, demo).size()));

    update_household_finances(s);
    const auto funding = apply_direct_funding(s, year);
    s.ledger = allocate_care(s, year, care, funding.funded);
    record_unmet(s, s.ledger);
    collect_taxes(s, year);
    if (c.check_invariants) {
        if (auto err = verify_ledger(s.ledger, c.quantum_hours)) {
            throw SimulationError("care ledger invalid in year " + std::to_string(year) + ": " + *err);
        }
    }
    done(5, "quanta=" + std::to_string(s.ledger.quanta.size()));

    age_transitions(s);
    done(6, {});
    social_transitions(s, econ);
    done(7, {});
    const auto jobs = job_market_step(s, year, econ);
    done(8, "hires=" + std::to_string(jobs.hires.size()) + " fires=" + std::to_string(jobs.fires.size()));
    done(9, "count=" + std::to_string(relocation_step(s, move).total()));
    done(10, "count=" + std::to_string(care_transition_step(s, year, health).transitions));
}

std::vector<MetricsRow> run_until(SimulationState &s, int last_year) {
    std::vector<MetricsRow> rows;
    last_year = std::min(last_year, s.cfg().end_year);
    while (s.year < last_year) {
        step_year(s);
        if (s.year >= s.cfg().reporting_start_year) {
            rows.push_back(collect_metrics(s));
        }
    }
    return rows;
}

std::vector<MetricsRow> run_simulation(const ScenarioConfig &config, std::shared_ptr<const RateTables> tables) {
    auto state = initialize(config, std::move(tables));
    return run_until(state, config.end_year);
}

} // namespace caresim
