#pragma once

#include "caresim/config.h"
#include "caresim/types.h"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace caresim {

class TableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate over any subset of (age, sex, ses, year). Age and year keys are
/// band starts: a lookup uses the greatest key not above the query, so a
/// table can be dense (one row per year) or banded (one row per decade).
/// Dimensions absent from the file collapse and ignore their argument.
class RateTable {
public:
    struct Row {
        int age = 0;
        Sex sex = Sex::Male;
        SesGroup ses = SesGroup::A;
        int year = 0;
        double rate = 0.0;
    };

    RateTable() = default;

    /// Builds a table from rows; every combination of the distinct keys
    /// present must appear exactly once.
    static RateTable from_rows(bool has_age, bool has_sex, bool has_ses, bool has_year,
                               const std::vector<Row> &rows, const std::string &name);

    /// Reads `age,sex,ses,year,rate` (any subset, any order; `age_band` is
    /// accepted for `age`). Errors name the file.
    static RateTable load_csv(const std::filesystem::path &path);

    void write_csv(const std::filesystem::path &path) const;

    double at(int age, Sex sex, SesGroup ses, int year) const noexcept;

    /// Throws TableError unless the table covers [min_age, max_age] x
    /// [min_year, max_year] and every rate lies in [lo, hi].
    void require(int min_age, int max_age, int min_year, int max_year, double lo, double hi) const;

    bool empty() const noexcept { return rates_.empty(); }
    const std::string &name() const noexcept { return name_; }
    bool has_age() const noexcept { return has_age_; }
    bool has_year() const noexcept { return has_year_; }

private:
    std::size_t offset(std::size_t a, std::size_t s, std::size_t g, std::size_t y) const noexcept;
    static std::size_t band(const std::vector<int> &keys, int value) noexcept;

    std::string name_;
    bool has_age_ = false;
    bool has_sex_ = false;
    bool has_ses_ = false;
    bool has_year_ = false;
    std::vector<int> ages_{0};
    std::vector<int> years_{0};
    std::vector<double> rates_;
};

struct RateTables {
    RateTable mortality;      // age, sex, year: annual death probability, census..projection
    RateTable lee_carter_ax;  // age, sex
    RateTable lee_carter_bx;  // age, sex
    RateTable fertility;      // age, ses, year: annual birth probability of a partnered woman
    RateTable divorce;        // age (wife's), annual probability
    RateTable unemployment;   // year, age band, ses
    RateTable care_onset;     // age, sex, ses: None -> Low
    RateTable care_progression;  // age, sex, ses: one level up from Low and above

    /// File names inside a tables directory.
    static constexpr const char *kFiles[] = {"mortality.csv",   "lee_carter_ax.csv",
                                             "lee_carter_bx.csv", "fertility.csv",
                                             "divorce.csv",     "unemployment.csv",
                                             "care_onset.csv",  "care_progression.csv"};

    static RateTables load(const std::filesystem::path &dir);
    void write(const std::filesystem::path &dir) const;

    /// Coverage and range checks against the configured simulation span.
    void validate(const ScenarioConfig &config) const;
};

/// Parametric synthetic defaults. Shapes are stylised stand-ins for the
/// historical series and are not fitted to any data.
RateTables synthetic_rate_tables(const ScenarioConfig &config);

inline constexpr int kMaxAge = 120;

} // namespace caresim
