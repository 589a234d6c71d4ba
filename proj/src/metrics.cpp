#include "caresim/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

namespace caresim {

namespace {

constexpr double kNa = std::numeric_limits<double>::quiet_NaN();

double ratio(double num, double den) { return den > 0.0 ? num / den : kNa; }

void add(CareTotals &t, const ReceiverSummary &r) {
    t.need += r.need;
    t.informal += r.informal;
    t.formal += r.formal;
    t.unmet += r.unmet;
    ++t.receivers;
}

using Getter = std::function<double(const MetricsRow &)>;

std::vector<std::pair<std::string, Getter>> build_columns() {
    std::vector<std::pair<std::string, Getter>> cols;
    auto col = [&](std::string name, Getter g) { cols.emplace_back(std::move(name), std::move(g)); };
    col("year", [](const MetricsRow &r) { return r.year; });
    col("population", [](const MetricsRow &r) { return r.population; });
    col("households", [](const MetricsRow &r) { return r.households; });
    col("employed", [](const MetricsRow &r) { return r.employed; });
    col("unemployed", [](const MetricsRow &r) { return r.unemployed; });
    col("retired", [](const MetricsRow &r) { return r.retired; });
    col("receivers", [](const MetricsRow &r) { return r.total.receivers; });
    col("need_hours", [](const MetricsRow &r) { return r.total.need; });
    col("informal_hours", [](const MetricsRow &r) { return r.total.informal; });
    col("formal_hours", [](const MetricsRow &r) { return r.total.formal; });
    col("unmet_hours", [](const MetricsRow &r) { return r.total.unmet; });
    col("state_funded_hours", [](const MetricsRow &r) { return r.state_funded_hours; });
    col("per_recipient_informal", [](const MetricsRow &r) { return r.per_recipient_informal; });
    col("per_recipient_formal", [](const MetricsRow &r) { return r.per_recipient_formal; });
    col("per_recipient_unmet", [](const MetricsRow &r) { return r.per_recipient_unmet; });
    static const char *levels[] = {"none", "low", "moderate", "substantial", "critical"};
    for (int l = 1; l < kCareLevels; ++l) {
        const std::string p = std::string(levels[l]) + "_";
        const auto i = std::size_t(l);
        col(p + "receivers", [i](const MetricsRow &r) { return r.by_level[i].receivers; });
        col(p + "informal", [i](const MetricsRow &r) { return r.by_level[i].informal; });
        col(p + "formal", [i](const MetricsRow &r) { return r.by_level[i].formal; });
        col(p + "unmet", [i](const MetricsRow &r) { return r.by_level[i].unmet; });
    }
    for (SesGroup g : kAllSes) {
        const std::string p = "ses_" + std::string(to_string(g)) + "_";
        const auto i = std::size_t(index_of(g));
        col(p + "receivers", [i](const MetricsRow &r) { return r.by_ses[i].receivers; });
        col(p + "informal", [i](const MetricsRow &r) { return r.by_ses[i].informal; });
        col(p + "formal", [i](const MetricsRow &r) { return r.by_ses[i].formal; });
        col(p + "unmet", [i](const MetricsRow &r) { return r.by_ses[i].unmet; });
    }
    for (std::size_t d = 0; d < 4; ++d) {
        const std::string p = "distance" + std::to_string(d) + "_";
        col(p + "informal", [d](const MetricsRow &r) { return r.informal_by_distance[d]; });
        col(p + "formal", [d](const MetricsRow &r) { return r.formal_by_distance[d]; });
    }
    col("female_informal_share", [](const MetricsRow &r) { return r.female_informal_share; });
    col("female_mean_income", [](const MetricsRow &r) { return r.female_mean_income; });
    col("male_mean_income", [](const MetricsRow &r) { return r.male_mean_income; });
    col("income_ratio", [](const MetricsRow &r) { return r.income_ratio; });
    col("hospital_days", [](const MetricsRow &r) { return r.hospital_days; });
    col("hospital_cost", [](const MetricsRow &r) { return r.hospital_cost; });
    col("hospital_cost_per_capita", [](const MetricsRow &r) { return r.hospital_cost_per_capita; });
    col("policy_cost", [](const MetricsRow &r) { return r.policy_cost; });
    col("tax_revenue", [](const MetricsRow &r) { return r.tax_revenue; });
    col("treasury_balance", [](const MetricsRow &r) { return r.treasury_balance; });
    col("births", [](const MetricsRow &r) { return r.births; });
    col("deaths", [](const MetricsRow &r) { return r.deaths; });
    col("marriages", [](const MetricsRow &r) { return r.marriages; });
    col("divorces", [](const MetricsRow &r) { return r.divorces; });
    col("adoptions", [](const MetricsRow &r) { return r.adoptions; });
    col("hires", [](const MetricsRow &r) { return r.hires; });
    col("fires", [](const MetricsRow &r) { return r.fires; });
    col("relocations", [](const MetricsRow &r) { return r.relocations; });
    return cols;
}

const std::vector<std::pair<std::string, Getter>> &columns() {
    static const auto cols = build_columns();
    return cols;
}

} // namespace

MetricsRow collect_metrics(const SimulationState &s) {
    MetricsRow row;
    row.year = s.year;
    row.population = static_cast<int>(s.population());
    for (const auto &h : s.households) {
        row.households += h.active ? 1 : 0;
    }
    double female_income = 0.0;
    double male_income = 0.0;
    int female_earners = 0;
    int male_earners = 0;
    for (const auto &a : s.agents) {
        if (!a.alive) {
            continue;
        }
        row.employed += a.status == Status::Employed;
        row.unemployed += a.status == Status::Unemployed;
        row.retired += a.status == Status::Retired;
        // Everyone who held a job through the year, including parents on
        // newborn leave whose realized income is zero.
        if (a.status == Status::Employed && !a.hired_this_year) {
            if (a.sex == Sex::Female) {
                female_income += a.realized_income;
                ++female_earners;
            } else {
                male_income += a.realized_income;
                ++male_earners;
            }
        }
    }
    row.female_mean_income = female_earners ? female_income / female_earners : kNa;
    row.male_mean_income = male_earners ? male_income / male_earners : kNa;
    row.income_ratio = female_earners && male_earners ? row.female_mean_income / row.male_mean_income : kNa;

    for (const auto &r : s.ledger.receivers) {
        add(row.total, r);
        add(row.by_level[std::size_t(index_of(r.level))], r);
        add(row.by_ses[std::size_t(index_of(s.agent(r.id).ses))], r);
    }
    row.state_funded_hours = s.ledger.state_funded_hours;
    row.per_recipient_informal = ratio(row.total.informal, row.total.receivers);
    row.per_recipient_formal = ratio(row.total.formal, row.total.receivers);
    row.per_recipient_unmet = ratio(row.total.unmet, row.total.receivers);

    double female_informal = 0.0;
    double informal = 0.0;
    for (const auto &q : s.ledger.quanta) {
        const auto d = std::size_t(std::clamp(q.distance, 0, 3));
        if (q.kind == CareKind::Informal) {
            row.informal_by_distance[d] += q.hours;
            informal += q.hours;
            if (s.agent(q.supplier_agent).sex == Sex::Female) {
                female_informal += q.hours;
            }
        } else {
            row.formal_by_distance[d] += q.hours;
        }
    }
    // State-funded care has no supplier household; it is reported in the
    // totals and in state_funded_hours only.
    row.female_informal_share = ratio(female_informal, informal);

    row.hospital_days = s.counters.hospital_days;
    row.hospital_cost = s.counters.hospital_cost;
    row.hospital_cost_per_capita = ratio(row.hospital_cost, row.population);
    row.policy_cost = s.counters.policy_cost;
    row.tax_revenue = s.counters.tax_revenue;
    row.treasury_balance = s.treasury.balance();
    row.births = s.counters.births;
    row.deaths = s.counters.deaths;
    row.marriages = s.counters.marriages;
    row.divorces = s.counters.divorces;
    row.adoptions = s.counters.adoptions;
    row.hires = s.counters.hires;
    row.fires = s.counters.fires;
    row.relocations = s.counters.relocations;
    return row;
}

std::vector<std::string> metrics_columns() {
    std::vector<std::string> names;
    for (const auto &[name, get] : columns()) {
        names.push_back(name);
    }
    return names;
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "NA";
    }
    if (v == 0.0) {
        return "0";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_metrics_header(std::ostream &out) {
    bool first = true;
    for (const auto &[name, get] : columns()) {
        out << (first ? "" : ",") << name;
        first = false;
    }
    out << '\n';
}

void write_metrics_row(std::ostream &out, const MetricsRow &row) {
    bool first = true;
    for (const auto &[name, get] : columns()) {
        out << (first ? "" : ",") << format_number(get(row));
        first = false;
    }
    out << '\n';
}

void write_metrics_csv(std::ostream &out, const std::vector<MetricsRow> &rows) {
    write_metrics_header(out);
    for (const auto &r : rows) {
        write_metrics_row(out, r);
    }
}

} // namespace caresim
