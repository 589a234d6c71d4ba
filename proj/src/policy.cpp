#include "caresim/policy.h"

#include "caresim/engine.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace caresim {

bool direct_funding_active(const ScenarioConfig &c, int year) noexcept {
    return c.policy == Policy::DirectFunding && year >= c.policy_year;
}

DirectFunding apply_direct_funding(SimulationState &s, int year) {
    DirectFunding out;
    const auto &c = s.cfg();
    if (!direct_funding_active(c, year)) {
        return out;
    }
    for (const auto &a : s.agents) {
        if (a.alive && a.care_need == CareNeedLevel::Critical) {
            out.funded.push_back(a.id);
            out.weekly_hours += care_hours(a.care_need);
        }
    }
    out.weekly_cost = out.weekly_hours * c.care_price;
    out.annual_cost = out.weekly_cost * 52.0;
    s.treasury.policy_spending += out.annual_cost;
    s.counters.policy_cost += out.annual_cost;
    return out;
}

const MetricsRow *ScenarioOutcome::row(int year) const noexcept {
    auto it = std::lower_bound(rows.begin(), rows.end(), year,
                               [](const MetricsRow &r, int y) { return r.year < y; });
    return it != rows.end() && it->year == year ? &*it : nullptr;
}

double discounted_sum(const std::vector<double> &values, double r) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i] / std::pow(1.0 + r, static_cast<double>(i));
    }
    return sum;
}

double icer(const ScenarioOutcome &p, const ScenarioOutcome &b, int from_year, int to_year, double r) {
    std::vector<double> cost;
    std::vector<double> unmet_b;
    std::vector<double> unmet_p;
    for (int y = from_year; y <= to_year; ++y) {
        const auto *rp = p.row(y);
        const auto *rb = b.row(y);
        if (!rp || !rb) {
            throw std::invalid_argument("outcomes do not both cover year " + std::to_string(y));
        }
        cost.push_back(rp->policy_cost);
        unmet_b.push_back(rb->total.unmet);
        unmet_p.push_back(rp->total.unmet);
    }
    const double averted = discounted_sum(unmet_b, r) - discounted_sum(unmet_p, r);
    if (!(averted > 0.0)) {
        throw IcerUndefined();
    }
    return discounted_sum(cost, r) / averted;
}

double icer(const ScenarioOutcome &p, const ScenarioOutcome &b, const ScenarioConfig &c) {
    return icer(p, b, c.policy_year, c.end_year, c.discount_icer ? c.discount_rate : 0.0);
}

const ScenarioOutcome *ComparisonReport::outcome(const std::string &scenario, std::uint64_t seed) const noexcept {
    for (const auto &o : outcomes) {
        if (o.name == scenario && o.seed == seed) {
            return &o;
        }
    }
    return nullptr;
}

std::string scenario_name(Policy p) { return std::string(to_string(p)); }

std::vector<Scenario> policy_scenarios(const ScenarioConfig &base, const std::vector<Policy> &policies) {
    std::vector<Scenario> out;
    for (Policy p : policies) {
        ScenarioConfig c = base;
        c.policy = p;
        out.push_back({scenario_name(p), c});
    }
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) {
        throw std::invalid_argument("median of an empty sample");
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

void check_same_parameters(const std::vector<Scenario> &scenarios) {
    const auto ref = config_entries(scenarios.front().config);
    for (std::size_t i = 1; i < scenarios.size(); ++i) {
        const auto other = config_entries(scenarios[i].config);
        for (const auto &[key, value] : ref) {
            if (key == "policy.type" || key == "sim.seed") {
                continue;
            }
            auto it = other.find(key);
            if (it == other.end() || it->second != value) {
                throw ConfigError("scenario '" + scenarios[i].name + "' differs from '" +
                                  scenarios.front().name + "' in " + key +
                                  "; scenarios may differ only in policy.type");
            }
        }
    }
}

std::vector<ScenarioOutcome> run_seed(const std::vector<Scenario> &scenarios, std::uint64_t seed,
                                      const std::shared_ptr<const RateTables> &tables) {
    ScenarioConfig trunk = scenarios.front().config;
    trunk.seed = seed;
    SimulationState base = initialize(trunk, tables);
    const auto shared = run_until(base, trunk.policy_year - 1);
    std::vector<ScenarioOutcome> out;
    for (const auto &sc : scenarios) {
        ScenarioConfig cfg = sc.config;
        cfg.seed = seed;
        SimulationState branch = base;
        branch.config = std::make_shared<const ScenarioConfig>(cfg);
        ScenarioOutcome o;
        o.name = sc.name;
        o.policy = cfg.policy;
        o.seed = seed;
        o.rows = shared;
        const auto rest = run_until(branch, cfg.end_year);
        o.rows.insert(o.rows.end(), rest.begin(), rest.end());
        out.push_back(std::move(o));
    }
    return out;
}

} // namespace

ComparisonReport run_scenario_set(const std::vector<Scenario> &scenarios, const std::vector<std::uint64_t> &seeds,
                                  std::shared_ptr<const RateTables> tables, int workers) {
    if (scenarios.empty() || seeds.empty()) {
        throw ConfigError("scenario set needs at least one scenario and one seed");
    }
    check_same_parameters(scenarios);

    std::vector<std::vector<ScenarioOutcome>> per_seed(seeds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                per_seed[i] = run_seed(scenarios, seeds[i], tables);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const int n = std::clamp(workers, 1, static_cast<int>(seeds.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ComparisonReport report;
    for (std::size_t sc = 0; sc < scenarios.size(); ++sc) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            report.outcomes.push_back(per_seed[i][sc]);
        }
    }

    const auto bench_it = std::find_if(scenarios.begin(), scenarios.end(),
                                       [](const Scenario &s) { return s.config.policy == Policy::None; });
    if (bench_it == scenarios.end()) {
        return report;
    }
    const auto bench = static_cast<std::size_t>(bench_it - scenarios.begin());
    const auto &cfg = scenarios.front().config;
    const double r = cfg.discount_icer ? cfg.discount_rate : 0.0;
    for (std::size_t sc = 0; sc < scenarios.size(); ++sc) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const auto &b = per_seed[i][bench];
            const auto &p = per_seed[i][sc];
            std::vector<double> hb;
            std::vector<double> hp;
            for (int y = cfg.policy_year; y <= cfg.end_year; ++y) {
                hb.push_back(b.row(y) ? b.row(y)->hospital_cost : 0.0);
                hp.push_back(p.row(y) ? p.row(y)->hospital_cost : 0.0);
            }
            const double dp = discounted_sum(hp, r);
            report.spillover.push_back({scenarios[sc].name, seeds[i], dp, dp - discounted_sum(hb, r)});
        }
        if (sc == bench) {
            continue;
        }
        IcerSummary summary;
        summary.scenario = scenarios[sc].name;
        std::vector<double> defined;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            IcerRow row{scenarios[sc].name, seeds[i], std::nullopt};
            try {
                row.icer = icer(per_seed[i][sc], per_seed[i][bench], scenarios[sc].config);
                defined.push_back(*row.icer);
            } catch (const IcerUndefined &) {
                ++summary.undefined;
            }
            report.icers.push_back(row);
        }
        if (!defined.empty()) {
            summary.median = median(defined);
            summary.min = *std::min_element(defined.begin(), defined.end());
            summary.max = *std::max_element(defined.begin(), defined.end());
        }
        report.summaries.push_back(summary);
    }
    return report;
}

namespace {

std::string opt(const std::optional<double> &v) { return v ? format_number(*v) : "NA"; }

std::ofstream open_out(const std::filesystem::path &p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    return out;
}

} // namespace

std::vector<std::filesystem::path> write_report(const ComparisonReport &report, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    for (const auto &o : report.outcomes) {
        const auto path = dir / ("outcome_" + o.name + "_seed" + std::to_string(o.seed) + ".csv");
        auto out = open_out(path);
        write_metrics_csv(out, o.rows);
        files.push_back(path);
    }
    {
        const auto path = dir / "comparison.csv";
        auto out = open_out(path);
        out << "scenario,seed,year,total_unmet_hours,per_recipient_unmet,policy_cost,hospital_cost\n";
        for (const auto &o : report.outcomes) {
            for (const auto &r : o.rows) {
                out << o.name << ',' << o.seed << ',' << r.year << ',' << format_number(r.total.unmet) << ','
                    << format_number(r.per_recipient_unmet) << ',' << format_number(r.policy_cost) << ','
                    << format_number(r.hospital_cost) << '\n';
            }
        }
        files.push_back(path);
    }
    {
        const auto path = dir / "icer.csv";
        auto out = open_out(path);
        out << "scenario,seed,icer,undefined_flag\n";
        for (const auto &r : report.icers) {
            out << r.scenario << ',' << r.seed << ',' << opt(r.icer) << ',' << (r.icer ? 0 : 1) << '\n';
        }
        files.push_back(path);
    }
    {
        const auto path = dir / "icer_summary.csv";
        auto out = open_out(path);
        out << "scenario,median,min,max,undefined_count\n";
        for (const auto &s : report.summaries) {
            out << s.scenario << ',' << opt(s.median) << ',' << opt(s.min) << ',' << opt(s.max) << ','
                << s.undefined << '\n';
        }
        files.push_back(path);
    }
    {
        const auto path = dir / "spillover.csv";
        auto out = open_out(path);
        out << "scenario,seed,discounted_hospital_cost,delta_vs_benchmark\n";
        for (const auto &s : report.spillover) {
            out << s.scenario << ',' << s.seed << ',' << format_number(s.discounted_hospital_cost) << ','
                << format_number(s.delta_vs_benchmark) << '\n';
        }
        files.push_back(path);
    }
    return files;
}

} // namespace caresim
