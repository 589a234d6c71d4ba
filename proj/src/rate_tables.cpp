#include "caresim/rate_tables.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace caresim {

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    return out;
}

template <class T> bool parse_cell(const std::string &s, T &out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::vector<int> distinct(std::vector<int> keys) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

} // namespace

std::size_t RateTable::band(const std::vector<int> &keys, int value) noexcept {
    auto it = std::upper_bound(keys.begin(), keys.end(), value);
    if (it == keys.begin()) {
        return 0;
    }
    return static_cast<std::size_t>(it - keys.begin()) - 1;
}

std::size_t RateTable::offset(std::size_t a, std::size_t s, std::size_t g,
                              std::size_t y) const noexcept {
    const std::size_t n_sex = has_sex_ ? 2 : 1;
    const std::size_t n_ses = has_ses_ ? kSesGroups : 1;
    return ((a * n_sex + s) * n_ses + g) * years_.size() + y;
}

RateTable RateTable::from_rows(bool has_age, bool has_sex, bool has_ses, bool has_year,
                               const std::vector<Row> &rows, const std::string &name) {
    RateTable t;
    t.name_ = name;
    t.has_age_ = has_age;
    t.has_sex_ = has_sex;
    t.has_ses_ = has_ses;
    t.has_year_ = has_year;
    if (rows.empty()) {
        throw TableError(name + ": table has no rows");
    }
    std::vector<int> ages, years;
    for (const auto &r : rows) {
        ages.push_back(has_age ? r.age : 0);
        years.push_back(has_year ? r.year : 0);
    }
    t.ages_ = distinct(std::move(ages));
    t.years_ = distinct(std::move(years));
    const std::size_t n_sex = has_sex ? 2 : 1;
    const std::size_t n_ses = has_ses ? kSesGroups : 1;
    const std::size_t cells = t.ages_.size() * n_sex * n_ses * t.years_.size();
    t.rates_.assign(cells, std::nan(""));
    std::vector<bool> seen(cells, false);
    for (const auto &r : rows) {
        const auto a = static_cast<std::size_t>(
            std::lower_bound(t.ages_.begin(), t.ages_.end(), has_age ? r.age : 0) - t.ages_.begin());
        const auto y = static_cast<std::size_t>(
            std::lower_bound(t.years_.begin(), t.years_.end(), has_year ? r.year : 0) -
            t.years_.begin());
        const std::size_t s = has_sex ? static_cast<std::size_t>(index_of(r.sex)) : 0;
        const std::size_t g = has_ses ? static_cast<std::size_t>(index_of(r.ses)) : 0;
        const auto off = t.offset(a, s, g, y);
        if (seen[off]) {
            throw TableError(name + ": duplicate cell at age " + std::to_string(r.age) + " year " +
                             std::to_string(r.year));
        }
        seen[off] = true;
        t.rates_[off] = r.rate;
    }
    for (std::size_t i = 0; i < cells; ++i) {
        if (!seen[i]) {
            throw TableError(name + ": missing cell; every combination of keys must be present");
        }
    }
    return t;
}

RateTable RateTable::load_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw TableError("cannot open rate table " + path.string());
    }
    const std::string name = path.string();
    std::string line;
    if (!std::getline(in, line)) {
        throw TableError(name + ": empty file");
    }
    const auto header = split_csv_line(line);
    int col_age = -1, col_sex = -1, col_ses = -1, col_year = -1, col_rate = -1;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        const auto &h = header[static_cast<std::size_t>(i)];
        if (h == "age" || h == "age_band") col_age = i;
        else if (h == "sex") col_sex = i;
        else if (h == "ses") col_ses = i;
        else if (h == "year") col_year = i;
        else if (h == "rate") col_rate = i;
        else throw TableError(name + ": unknown column '" + h + "'");
    }
    if (col_rate < 0) {
        throw TableError(name + ": missing 'rate' column");
    }
    std::vector<Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = split_csv_line(line);
        auto bad = [&](const char *what) {
            return TableError(name + ":" + std::to_string(line_no) + ": bad " + what);
        };
        if (cells.size() != header.size()) {
            throw bad("column count");
        }
        Row r;
        if (col_age >= 0 && !parse_cell(cells[static_cast<std::size_t>(col_age)], r.age)) throw bad("age");
        if (col_year >= 0 && !parse_cell(cells[static_cast<std::size_t>(col_year)], r.year)) throw bad("year");
        if (col_sex >= 0) {
            auto s = parse_sex(cells[static_cast<std::size_t>(col_sex)]);
            if (!s) throw bad("sex");
            r.sex = *s;
        }
        if (col_ses >= 0) {
            auto g = parse_ses(cells[static_cast<std::size_t>(col_ses)]);
            if (!g) throw bad("ses");
            r.ses = *g;
        }
        if (!parse_cell(cells[static_cast<std::size_t>(col_rate)], r.rate) || !std::isfinite(r.rate)) {
            throw bad("rate");
        }
        rows.push_back(r);
    }
    return from_rows(col_age >= 0, col_sex >= 0, col_ses >= 0, col_year >= 0, rows, name);
}

void RateTable::write_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        throw TableError("cannot write rate table " + path.string());
    }
    std::vector<std::string> cols;
    if (has_age_) cols.push_back("age");
    if (has_sex_) cols.push_back("sex");
    if (has_ses_) cols.push_back("ses");
    if (has_year_) cols.push_back("year");
    cols.push_back("rate");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
    const std::size_t n_sex = has_sex_ ? 2 : 1;
    const std::size_t n_ses = has_ses_ ? kSesGroups : 1;
    char buf[64];
    for (std::size_t a = 0; a < ages_.size(); ++a) {
        for (std::size_t s = 0; s < n_sex; ++s) {
            for (std::size_t g = 0; g < n_ses; ++g) {
                for (std::size_t y = 0; y < years_.size(); ++y) {
                    if (has_age_) out << ages_[a] << ',';
                    if (has_sex_) out << to_string(static_cast<Sex>(s)) << ',';
                    if (has_ses_) out << to_string(ses_from_index(static_cast<int>(g))) << ',';
                    if (has_year_) out << years_[y] << ',';
                    auto res = std::to_chars(buf, buf + sizeof buf, rates_[offset(a, s, g, y)]);
                    out.write(buf, res.ptr - buf);
                    out << '\n';
                }
            }
        }
    }
}

double RateTable::at(int age, Sex sex, SesGroup ses, int year) const noexcept {
    const std::size_t a = has_age_ ? band(ages_, age) : 0;
    const std::size_t y = has_year_ ? band(years_, year) : 0;
    const std::size_t s = has_sex_ ? static_cast<std::size_t>(index_of(sex)) : 0;
    const std::size_t g = has_ses_ ? static_cast<std::size_t>(index_of(ses)) : 0;
    return rates_[offset(a, s, g, y)];
}

void RateTable::require(int min_age, int max_age, int min_year, int max_year, double lo,
                        double hi) const {
    if (rates_.empty()) {
        throw TableError(name_ + ": table not loaded");
    }
    if (has_age_ && ages_.front() > min_age) {
        throw TableError(name_ + ": does not cover age " + std::to_string(min_age));
    }
    if (has_year_ && years_.front() > min_year) {
        throw TableError(name_ + ": does not cover year " + std::to_string(min_year));
    }
    (void)max_age;
    (void)max_year;  // band semantics extend the last key upward
    for (double r : rates_) {
        if (!(r >= lo && r <= hi)) {
            throw TableError(name_ + ": rate " + std::to_string(r) + " outside [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }
}

RateTables RateTables::load(const std::filesystem::path &dir) {
    RateTables t;
    RateTable *slots[] = {&t.mortality,  &t.lee_carter_ax, &t.lee_carter_bx, &t.fertility,
                          &t.divorce,    &t.unemployment,  &t.care_onset,    &t.care_progression};
    for (std::size_t i = 0; i < std::size(kFiles); ++i) {
        *slots[i] = RateTable::load_csv(dir / kFiles[i]);
    }
    return t;
}

void RateTables::write(const std::filesystem::path &dir) const {
    std::filesystem::create_directories(dir);
    const RateTable *slots[] = {&mortality, &lee_carter_ax, &lee_carter_bx, &fertility,
                                &divorce,   &unemployment,  &care_onset,    &care_progression};
    for (std::size_t i = 0; i < std::size(kFiles); ++i) {
        slots[i]->write_csv(dir / kFiles[i]);
    }
}

void RateTables::validate(const ScenarioConfig &c) const {
    mortality.require(0, kMaxAge, c.census_year, c.projection_year, 0.0, 1.0);
    if (mortality.has_year() && !mortality.has_age()) {
        throw TableError(mortality.name() + ": mortality table needs an age column");
    }
    lee_carter_ax.require(0, kMaxAge, 0, 0, -50.0, 10.0);
    lee_carter_bx.require(0, kMaxAge, 0, 0, -10.0, 10.0);
    fertility.require(c.fertile_min_age, c.fertile_max_age, c.start_year, c.end_year, 0.0, 1.0);
    divorce.require(c.min_working_age, kMaxAge, c.start_year, c.end_year, 0.0, 1.0);
    unemployment.require(c.min_working_age, c.retirement_age, c.start_year, c.end_year, 0.0, 1.0);
    care_onset.require(0, kMaxAge, c.start_year, c.end_year, 0.0, 1.0);
    care_progression.require(0, kMaxAge, c.start_year, c.end_year, 0.0, 1.0);
}

namespace {

double interpolate(const std::vector<std::pair<int, double>> &knots, int x) {
    if (x <= knots.front().first) return knots.front().second;
    if (x >= knots.back().first) return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (x <= knots[i].first) {
            const auto [x0, y0] = knots[i - 1];
            const auto [x1, y1] = knots[i];
            return y0 + (y1 - y0) * double(x - x0) / double(x1 - x0);
        }
    }
    return knots.back().second;
}

// Log central death rate at the projection base year.
double base_log_mortality(int age, Sex sex) {
    const double infant = age == 0 ? 0.005 : 0.0;
    if (sex == Sex::Male) {
        return std::log(0.0004 + infant + 0.000028 * std::exp(0.096 * age));
    }
    return std::log(0.00025 + infant + 0.000014 * std::exp(0.099 * age));
}

// Sensitivity of log mortality to the period index; larger for men so the
// sex gap narrows as mortality falls.
double mortality_sensitivity(int age, Sex sex) {
    const double young = age < 20 ? 1.6 - 0.035 * age : 0.9;
    const double old = age > 75 ? std::max(0.25, 0.9 - 0.025 * (age - 75)) : 0.9;
    const double b = std::min(young, old);
    return sex == Sex::Male ? 1.15 * b : b;
}

} // namespace

RateTables synthetic_rate_tables(const ScenarioConfig &c) {
    RateTables t;
    const double lc_span = static_cast<double>(c.projection_year - c.census_year);

    {
        std::vector<RateTable::Row> rows;
        for (int age = 0; age <= kMaxAge; ++age) {
            for (Sex sex : {Sex::Male, Sex::Female}) {
                for (int year = c.census_year; year <= c.projection_year; ++year) {
                    // k runs linearly from 1 at the census year to lc_k0 at the base year.
                    const double k =
                        c.lc_k0 + (1.0 - c.lc_k0) * double(c.projection_year - year) / lc_span;
                    const double m = std::exp(base_log_mortality(age, sex) +
                                              mortality_sensitivity(age, sex) * k);
                    rows.push_back({age, sex, SesGroup::A, year, 1.0 - std::exp(-m)});
                }
            }
        }
        t.mortality = RateTable::from_rows(true, true, false, true, rows, "mortality");
    }
    {
        std::vector<RateTable::Row> ax, bx;
        for (int age = 0; age <= kMaxAge; ++age) {
            for (Sex sex : {Sex::Male, Sex::Female}) {
                ax.push_back({age, sex, SesGroup::A, 0, base_log_mortality(age, sex)});
                bx.push_back({age, sex, SesGroup::A, 0, mortality_sensitivity(age, sex)});
            }
        }
        t.lee_carter_ax = RateTable::from_rows(true, true, false, false, ax, "lee_carter_ax");
        t.lee_carter_bx = RateTable::from_rows(true, true, false, false, bx, "lee_carter_bx");
    }
    {
        // Total fertility of partnered women by year.
        const std::vector<std::pair<int, double>> tfr = {
            {1860, 6.6}, {1900, 5.6}, {1920, 4.2}, {1935, 3.4}, {1945, 4.4}, {1955, 5.2},
            {1965, 5.4}, {1975, 3.4}, {1990, 3.0}, {2005, 2.9}, {2014, 2.6}, {2020, 1.4}, {2040, 1.0}};
        const std::array<double, kSesGroups> ses_mod{0.8, 0.9, 1.0, 1.1, 1.2};
        std::vector<double> shape;
        double shape_sum = 0.0;
        for (int age = c.fertile_min_age; age <= c.fertile_max_age; ++age) {
            const double z = (age - 28.0) / 6.0;
            shape.push_back(std::exp(-0.5 * z * z));
            shape_sum += shape.back();
        }
        std::vector<RateTable::Row> rows;
        for (int age = c.fertile_min_age; age <= c.fertile_max_age; ++age) {
            for (auto ses : kAllSes) {
                for (int year = c.start_year; year <= c.end_year; ++year) {
                    const double r = interpolate(tfr, year) *
                                     shape[std::size_t(age - c.fertile_min_age)] / shape_sum *
                                     ses_mod[std::size_t(index_of(ses))];
                    rows.push_back({age, Sex::Female, ses, year, std::min(1.0, r)});
                }
            }
        }
        t.fertility = RateTable::from_rows(true, false, true, true, rows, "fertility");
    }
    {
        std::vector<RateTable::Row> rows;
        const std::vector<std::pair<int, double>> bands = {{0, 0.0},    {16, 0.02},  {25, 0.015},
                                                           {35, 0.01},  {45, 0.006}, {55, 0.003},
                                                           {65, 0.001}};
        for (auto [age, rate] : bands) {
            rows.push_back({age, Sex::Male, SesGroup::A, 0, rate});
        }
        t.divorce = RateTable::from_rows(true, false, false, false, rows, "divorce");
    }
    {
        const std::array<double, kSesGroups> ses_base{0.02, 0.03, 0.045, 0.065, 0.09};
        const std::vector<std::pair<int, double>> age_mult = {{0, 1.8}, {25, 1.0}, {50, 1.1}};
        const std::vector<std::pair<int, double>> year_mult = {
            {1860, 1.0}, {1920, 1.6}, {1930, 2.0}, {1940, 0.6}, {1950, 0.5}, {1970, 0.8},
            {1980, 1.6}, {1990, 1.3}, {2000, 1.0}, {2010, 1.2}, {2020, 1.0}};
        std::vector<RateTable::Row> rows;
        for (auto [year, ym] : year_mult) {
            for (auto [age, am] : age_mult) {
                for (auto ses : kAllSes) {
                    rows.push_back({age, Sex::Male, ses, year,
                                    std::min(1.0, ses_base[std::size_t(index_of(ses))] * am * ym)});
                }
            }
        }
        t.unemployment = RateTable::from_rows(true, false, true, true, rows, "unemployment");
    }
    {
        const std::array<double, kSesGroups> ses_mod{0.7, 0.85, 1.0, 1.2, 1.4};
        std::vector<RateTable::Row> onset, progression;
        for (int age = 0; age <= kMaxAge; ++age) {
            for (Sex sex : {Sex::Male, Sex::Female}) {
                const double sex_mod = sex == Sex::Female ? 1.15 : 1.0;
                for (auto ses : kAllSes) {
                    const double m = ses_mod[std::size_t(index_of(ses))] * sex_mod;
                    const double on = 0.022 * std::exp(0.09 * (age - 60));
                    const double up = 0.16 * std::exp(0.04 * (age - 60));
                    onset.push_back({age, sex, ses, 0, std::min(1.0, on * m)});
                    progression.push_back({age, sex, ses, 0, std::min(1.0, up * m)});
                }
            }
        }
        t.care_onset = RateTable::from_rows(true, true, true, false, onset, "care_onset");
        t.care_progression =
            RateTable::from_rows(true, true, true, false, progression, "care_progression");
    }
    return t;
}

} // namespace caresim
