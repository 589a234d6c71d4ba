#include "caresim/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace caresim {

namespace {

// Synthetic population-density surface, 12 rows (north to south) by 8 columns
// (west to east). Zero cells are sea. Shape only loosely follows Great Britain.
const std::vector<double> kDefaultDensity = {
    0.0, 0.1, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0, //
    0.1, 0.1, 0.2, 0.2, 0.3, 0.0, 0.0, 0.0, //
    0.0, 0.2, 0.2, 0.3, 0.0, 0.0, 0.0, 0.0, //
    0.0, 0.2, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0, //
    0.4, 0.0, 0.2, 0.2, 0.4, 0.0, 0.0, 0.0, //
    0.6, 0.0, 0.0, 0.3, 0.8, 0.2, 0.0, 0.0, //
    0.0, 0.0, 0.0, 0.6, 0.8, 0.4, 0.0, 0.0, //
    0.0, 0.0, 0.2, 1.0, 0.8, 0.6, 0.1, 0.0, //
    0.0, 0.0, 0.1, 0.2, 1.0, 0.6, 0.3, 0.4, //
    0.0, 0.0, 0.5, 0.7, 0.5, 1.0, 1.0, 0.0, //
    0.0, 0.0, 0.2, 0.4, 0.6, 1.0, 1.0, 0.0, //
    0.0, 0.2, 0.4, 0.6, 0.4, 0.0, 0.0, 0.0,
};

const std::vector<double> kDefaultPyramid = {13.5, 12.0, 11.0, 10.0, 9.0, 8.0, 7.0, 6.2, 5.5,
                                              4.7,  4.0,  3.2,  2.5,  1.8, 1.2, 0.7, 0.3, 0.1};

const std::vector<double> kDefaultMarketEntry = {0.05, 0.25, 0.3, 0.2, 0.12, 0.08,
                                                 0.05, 0.03, 0.02, 0.01};

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string token;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!token.empty()) {
                out.push_back(token);
                token.clear();
            }
        } else {
            token.push_back(ch);
        }
    }
    if (!token.empty()) {
        out.push_back(token);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T> bool parse_number(std::string_view s, T &out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::vector<double> parse_doubles(std::string_view key, std::string_view value) {
    std::vector<double> out;
    for (const auto &tok : split_list(value)) {
        double d = 0.0;
        if (!parse_number(tok, d)) {
            throw ConfigError("bad number '" + tok + "' for key " + std::string(key));
        }
        out.push_back(d);
    }
    return out;
}

std::string join(const auto &values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) {
            out += ", ";
        }
        out += format_double(v);
    }
    return out;
}

/// Enumerates every configuration field with its flat key. The same list
/// drives parsing, dumping and diffing so they cannot drift apart.
template <class C, class V> void visit_fields(C &c, V &&v) {
    v("sim.seed", c.seed);
    v("sim.start_year", c.start_year);
    v("sim.census_year", c.census_year);
    v("sim.projection_year", c.projection_year);
    v("sim.policy_year", c.policy_year);
    v("sim.end_year", c.end_year);
    v("sim.reporting_start_year", c.reporting_start_year);
    v("sim.initial_population", c.initial_population);
    v("sim.check_invariants", c.check_invariants);
    v("sim.log_events", c.log_events);

    v("world.total_houses", c.total_houses);
    v("world.density_weights", c.density_weights);
    v("world.min_bedrooms", c.min_bedrooms);
    v("world.max_bedrooms", c.max_bedrooms);
    v("world.size_move_prob", c.size_move_prob);

    v("init.couple_fraction", c.couple_fraction);
    v("init.age_pyramid", c.age_pyramid);
    v("init.ses_shares", c.ses_shares);

    v("mortality.gm_male", c.gm_male);
    v("mortality.gm_female", c.gm_female);
    v("mortality.lc_k0", c.lc_k0);
    v("mortality.lc_drift", c.lc_drift);
    v("mortality.ses_modifier", c.mortality_ses_modifier);
    v("mortality.care_modifier", c.mortality_care_modifier);

    v("fertility.min_age", c.fertile_min_age);
    v("fertility.max_age", c.fertile_max_age);
    v("fertility.newborn_leave_years", c.newborn_leave_years);

    v("partnership.market_entry_rates", c.market_entry_rates);
    v("partnership.ses_weight", c.partner_ses_weight);
    v("partnership.age_weight", c.partner_age_weight);
    v("partnership.distance_weight", c.partner_distance_weight);
    v("partnership.male_higher_asymmetry", c.male_higher_asymmetry);

    v("economy.weekly_work_hours", c.weekly_work_hours);
    v("economy.tax_rate", c.tax_rate);
    v("economy.pension_rate", c.pension_rate);
    v("economy.retirement_age", c.retirement_age);
    v("economy.min_working_age", c.min_working_age);
    v("economy.experience_discount", c.experience_discount);
    v("economy.salary.A", c.salary[0]);
    v("economy.salary.B", c.salary[1]);
    v("economy.salary.C1", c.salary[2]);
    v("economy.salary.C2", c.salary[3]);
    v("economy.salary.D", c.salary[4]);
    v("economy.education_floor", c.education_floor);
    v("economy.education_ceiling", c.education_ceiling);
    v("economy.education_income_weight", c.education_income_weight);
    v("economy.education_gap_weight", c.education_gap_weight);
    v("economy.education_care_weight", c.education_care_weight);
    v("economy.hire_base", c.hire_base);
    v("economy.hire_floor", c.hire_floor);
    v("economy.fire_base", c.fire_base);
    v("economy.hire_ses_multiplier", c.hire_ses_multiplier);
    v("economy.fire_ses_multiplier", c.fire_ses_multiplier);
    v("economy.local_offer_prob", c.local_offer_prob);
    v("economy.job_change_rate", c.job_change_rate);
    v("economy.cross_town_acceptance", c.cross_town_acceptance);

    v("care.quantum_hours", c.quantum_hours);
    v("care.price_per_hour", c.care_price);
    v("care.kinship_decay", c.kinship_decay);
    v("care.budget_beta", c.care_budget_beta);
    v("care.unmet_frailty", c.unmet_frailty);
    v("care.progression_multiplier", c.progression_multiplier);
    v("care.hospital_base_days", c.hospital_base_days);
    v("care.hospital_unmet_gamma", c.hospital_unmet_gamma);
    v("care.hospital_cost_per_day", c.hospital_cost_per_day);

    v("migration.relocation_scale", c.relocation_scale);
    v("migration.relocation_exponent", c.relocation_exponent);
    v("migration.gate_bias", c.move_gate_bias);
    v("migration.cost_weight", c.move_cost_weight);
    v("migration.attraction_weight", c.move_attraction_weight);
    v("migration.homophily_weight", c.move_homophily_weight);
    v("migration.independence_prob", c.independence_prob);
    v("migration.retiree_move_scale", c.retiree_move_scale);

    v("policy.type", c.policy);
    v("policy.gov_care_share", c.gov_care_share);
    v("policy.discount_rate", c.discount_rate);
    v("policy.discount_icer", c.discount_icer);

    v("tables.dir", c.tables_dir);
}

struct Dumper {
    std::vector<std::pair<std::string, std::string>> out;

    void operator()(const char *key, std::uint64_t v) { out.emplace_back(key, std::to_string(v)); }
    void operator()(const char *key, int v) { out.emplace_back(key, std::to_string(v)); }
    void operator()(const char *key, bool v) { out.emplace_back(key, v ? "true" : "false"); }
    void operator()(const char *key, double v) { out.emplace_back(key, format_double(v)); }
    void operator()(const char *key, const std::string &v) { out.emplace_back(key, v); }
    void operator()(const char *key, Policy v) { out.emplace_back(key, std::string(to_string(v))); }
    void operator()(const char *key, const std::vector<double> &v) { out.emplace_back(key, join(v)); }
    template <std::size_t N> void operator()(const char *key, const std::array<double, N> &v) {
        out.emplace_back(key, join(v));
    }
    void operator()(const char *key, const SalaryCurve &v) {
        out.emplace_back(key, join(std::array{v.initial_wage, v.max_wage, v.growth_rate}));
    }
    void operator()(const char *key, const GompertzMakeham &v) {
        out.emplace_back(key, join(std::array{v.a, v.b, v.c}));
    }
};

struct Assigner {
    const std::string &key;
    const std::string &value;
    bool matched = false;

    bool is(const char *k) {
        if (key != k) {
            return false;
        }
        matched = true;
        return true;
    }
    [[noreturn]] void fail() const {
        throw ConfigError("bad value '" + value + "' for key " + key);
    }

    void operator()(const char *k, std::uint64_t &v) {
        if (is(k) && !parse_number(value, v)) fail();
    }
    void operator()(const char *k, int &v) {
        if (is(k) && !parse_number(value, v)) fail();
    }
    void operator()(const char *k, double &v) {
        if (is(k) && !parse_number(value, v)) fail();
    }
    void operator()(const char *k, bool &v) {
        if (!is(k)) return;
        if (value == "true" || value == "1") {
            v = true;
        } else if (value == "false" || value == "0") {
            v = false;
        } else {
            fail();
        }
    }
    void operator()(const char *k, std::string &v) {
        if (is(k)) v = value;
    }
    void operator()(const char *k, Policy &v) {
        if (!is(k)) return;
        auto p = parse_policy(value);
        if (!p) fail();
        v = *p;
    }
    void operator()(const char *k, std::vector<double> &v) {
        if (is(k)) v = parse_doubles(key, value);
    }
    template <std::size_t N> void operator()(const char *k, std::array<double, N> &v) {
        if (!is(k)) return;
        auto values = parse_doubles(key, value);
        if (values.size() != N) {
            throw ConfigError("key " + key + " expects " + std::to_string(N) + " values, got " +
                              std::to_string(values.size()));
        }
        std::copy(values.begin(), values.end(), v.begin());
    }
    void operator()(const char *k, SalaryCurve &v) {
        std::array<double, 3> tmp{};
        (*this)(k, tmp);
        if (key == k) v = SalaryCurve{tmp[0], tmp[1], tmp[2]};
    }
    void operator()(const char *k, GompertzMakeham &v) {
        std::array<double, 3> tmp{};
        (*this)(k, tmp);
        if (key == k) v = GompertzMakeham{tmp[0], tmp[1], tmp[2]};
    }
};

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

} // namespace

ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig c;
    c.density_weights = kDefaultDensity;
    c.age_pyramid = kDefaultPyramid;
    c.market_entry_rates = kDefaultMarketEntry;
    return c;
}

std::string ValidationReport::to_string() const {
    std::string out;
    for (const auto &v : violations) {
        out += v;
        out += '\n';
    }
    return out;
}

ValidationReport validate_config(const ScenarioConfig &c) {
    ValidationReport report;
    auto &v = report.violations;

    if (!(c.start_year < c.census_year && c.census_year < c.projection_year &&
          c.projection_year < c.policy_year && c.policy_year <= c.end_year)) {
        v.push_back("year ordering must satisfy start < census < projection < policy <= end");
    }
    if (c.reporting_start_year < c.start_year || c.reporting_start_year > c.end_year) {
        v.push_back("reporting start year must lie within [start_year, end_year]");
    }
    if (c.quantum_hours <= 0) {
        v.push_back("quantum must be positive");
    } else {
        for (auto level : {CareNeedLevel::Low, CareNeedLevel::Moderate, CareNeedLevel::Substantial,
                           CareNeedLevel::Critical}) {
            if (static_cast<int>(care_hours(level)) % c.quantum_hours != 0) {
                v.push_back("quantum must divide care-level hours (8,16,32,80)");
                break;
            }
        }
    }
    if (c.initial_population < 0) {
        v.push_back("initial population must be non-negative");
    }
    if (c.density_weights.size() != static_cast<std::size_t>(kGridRows * kGridCols)) {
        v.push_back("density weights must have " + std::to_string(kGridRows * kGridCols) +
                    " entries");
    } else if (std::any_of(c.density_weights.begin(), c.density_weights.end(),
                           [](double w) { return !(w >= 0.0); }) ||
               std::accumulate(c.density_weights.begin(), c.density_weights.end(), 0.0) <= 0.0) {
        v.push_back("density weights must be non-negative with a positive sum");
    }
    if (c.total_houses <= 0 || c.total_houses > kGridRows * kGridCols * kMaxHousesPerTown) {
        v.push_back("total houses must be positive and fit the grid");
    }
    if (c.min_bedrooms < 1 || c.max_bedrooms < c.min_bedrooms) {
        v.push_back("bedroom range must satisfy 1 <= min <= max");
    }
    if (c.age_pyramid.empty() ||
        std::accumulate(c.age_pyramid.begin(), c.age_pyramid.end(), 0.0) <= 0.0 ||
        std::any_of(c.age_pyramid.begin(), c.age_pyramid.end(), [](double w) { return w < 0.0; })) {
        v.push_back("age pyramid must be non-negative with a positive sum");
    }
    const double ses_total = std::accumulate(c.ses_shares.begin(), c.ses_shares.end(), 0.0);
    if (std::abs(ses_total - 1.0) > 1e-6 ||
        std::any_of(c.ses_shares.begin(), c.ses_shares.end(), [](double s) { return s < 0.0; })) {
        v.push_back("SES shares must be non-negative and sum to 1");
    }

    for (double p : {c.couple_fraction, c.size_move_prob, c.male_higher_asymmetry, c.tax_rate,
                     c.education_floor, c.education_ceiling, c.hire_floor, c.local_offer_prob,
                     c.job_change_rate, c.independence_prob, c.retiree_move_scale, c.gov_care_share,
                     c.discount_rate}) {
        if (!is_probability(p)) {
            v.push_back("probabilities and fractions must lie in [0,1]");
            break;
        }
    }
    if (c.education_floor > c.education_ceiling) {
        v.push_back("education floor must not exceed ceiling");
    }
    auto all_probs = [](const auto &xs) { return std::all_of(xs.begin(), xs.end(), is_probability); };
    if (!all_probs(c.market_entry_rates) || !all_probs(c.cross_town_acceptance)) {
        v.push_back("market entry and cross-town acceptance rates must lie in [0,1]");
    }
    if (c.fertile_min_age < 0 || c.fertile_max_age < c.fertile_min_age) {
        v.push_back("fertile age band must be non-empty");
    }
    if (c.newborn_leave_years < 0) {
        v.push_back("newborn leave years must be non-negative");
    }
    if (c.weekly_work_hours <= 0.0) {
        v.push_back("weekly work hours must be positive");
    }
    if (c.retirement_age <= c.min_working_age) {
        v.push_back("retirement age must exceed minimum working age");
    }
    if (c.pension_rate < 0.0) {
        v.push_back("pension rate must be non-negative");
    }
    for (std::size_t i = 0; i < c.salary.size(); ++i) {
        const auto &s = c.salary[i];
        if (!(s.initial_wage > 0.0 && s.initial_wage < s.max_wage && s.growth_rate > 0.0)) {
            v.push_back("salary curve " + std::string(to_string(ses_from_index(int(i)))) +
                        " must satisfy 0 < initial < max and growth > 0");
        }
        if (i > 0 && (s.initial_wage > c.salary[i - 1].initial_wage ||
                      s.max_wage > c.salary[i - 1].max_wage)) {
            v.push_back("salary curves must be ordered A >= B >= C1 >= C2 >= D at both endpoints");
        }
    }
    for (double m : c.mortality_ses_modifier) {
        if (m < 0.0) v.push_back("mortality SES modifiers must be non-negative");
    }
    for (std::size_t i = 1; i < c.mortality_ses_modifier.size(); ++i) {
        if (c.mortality_ses_modifier[i] < c.mortality_ses_modifier[i - 1]) {
            v.push_back("mortality SES modifier must not decrease from A to D");
            break;
        }
    }
    if (c.gm_male.a < 0.0 || c.gm_male.b < 0.0 || c.gm_female.a < 0.0 || c.gm_female.b < 0.0) {
        v.push_back("Gompertz-Makeham A and B must be non-negative");
    }
    if (!(c.care_price > 0.0)) {
        v.push_back("care price must be positive");
    }
    if (!(c.care_budget_beta > 0.0)) {
        v.push_back("care budget beta must be positive");
    }
    if (c.kinship_decay < 0.0 || c.unmet_frailty < 0.0 || c.hospital_unmet_gamma < 0.0 ||
        c.hospital_cost_per_day < 0.0) {
        v.push_back("care decay, frailty, hospital gamma and cost must be non-negative");
    }
    for (std::size_t i = 1; i < c.hospital_base_days.size(); ++i) {
        if (c.hospital_base_days[i] < c.hospital_base_days[i - 1] || c.hospital_base_days[0] != 0.0) {
            v.push_back("hospital base days must start at 0 and be non-decreasing in level");
            break;
        }
    }
    if (!(c.relocation_scale > 0.0)) {
        v.push_back("relocation scale K must be positive");
    }
    if (!(c.relocation_exponent > 0.0 && c.relocation_exponent <= 1.0)) {
        v.push_back("relocation exponent p must lie in (0,1]");
    }
    return report;
}

ScenarioConfig parse_config(const std::string &text) {
    ScenarioConfig c = ScenarioConfig::defaults();
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        auto stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        Assigner assign{key, value};
        visit_fields(c, assign);
        if (!assign.matched) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key " + key);
        }
    }
    return c;
}

ScenarioConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ScenarioConfig &config) {
    Dumper d;
    visit_fields(config, d);
    std::string out;
    for (const auto &[k, v] : d.out) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::map<std::string, std::string> config_entries(const ScenarioConfig &config) {
    Dumper d;
    visit_fields(config, d);
    return {d.out.begin(), d.out.end()};
}

} // namespace caresim
