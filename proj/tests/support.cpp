#include "support.h"

#include "caresim/economy.h"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace caresim::test {

std::shared_ptr<const RateTables> default_tables() {
    static const auto tables = std::make_shared<const RateTables>(synthetic_rate_tables(ScenarioConfig::defaults()));
    return tables;
}

namespace {

RateTable flat(double rate, const std::string &name) {
    return RateTable::from_rows(false, false, false, false, {RateTable::Row{0, Sex::Male, SesGroup::A, 0, rate}},
                                name);
}

} // namespace

std::shared_ptr<const RateTables> flat_tables(const FlatRates &r) {
    auto t = std::make_shared<RateTables>();
    t->mortality = flat(r.mortality, "mortality");
    t->lee_carter_ax = flat(std::log(-std::log(1.0 - std::min(r.mortality, 1.0 - 1e-12)) + 1e-300), "ax");
    t->lee_carter_bx = flat(0.0, "bx");
    t->fertility = flat(r.fertility, "fertility");
    t->divorce = flat(r.divorce, "divorce");
    t->unemployment = flat(r.unemployment, "unemployment");
    t->care_onset = flat(r.onset, "care_onset");
    t->care_progression = flat(r.progression, "care_progression");
    return t;
}

ScenarioConfig neutral_config() {
    ScenarioConfig c = ScenarioConfig::defaults();
    c.mortality_ses_modifier.fill(1.0);
    c.mortality_care_modifier.fill(1.0);
    return c;
}

TinyWorld::TinyWorld(int towns, int houses_per_town, ScenarioConfig config,
                     std::shared_ptr<const RateTables> tables) {
    std::vector<Town> ts;
    std::vector<House> hs;
    for (int t = 0; t < towns; ++t) {
        Town town;
        town.row = 0;
        town.col = t;
        town.density_weight = 1.0;
        for (int k = 0; k < houses_per_town; ++k) {
            town.houses.push_back(static_cast<HouseId>(hs.size()));
            hs.push_back(House{t, 3, kNoHousehold});
        }
        ts.push_back(std::move(town));
    }
    s.world = WorldGrid::from_towns(std::move(ts), std::move(hs));
    s.config = std::make_shared<const ScenarioConfig>(std::move(config));
    s.tables = std::move(tables);
    s.year = 2000;
    s.rng = RngStreams(1);
}

HouseholdId TinyWorld::home(TownId town) {
    for (HouseId h : s.world.town(town).houses) {
        if (s.world.house(h).occupant == kNoHousehold) {
            return s.create_household(h);
        }
    }
    throw std::runtime_error("test town is full");
}

AgentId TinyWorld::add(HouseholdId household, int age, Status status, Sex sex, SesGroup ses) {
    Agent a;
    a.age = age;
    a.birth_year = s.year - age;
    a.status = status;
    a.sex = sex;
    a.ses = ses;
    a.education = age >= 16 ? ses_rank(ses) : 0;
    a.household = household;
    a.last_wage = s.cfg().salary[std::size_t(index_of(ses))].initial_wage;
    if (status == Status::Employed) {
        a.hourly_wage = a.last_wage;
        a.worked_fraction = 1.0;
    }
    return s.add_agent(std::move(a));
}

AgentId TinyWorld::worker(HouseholdId household, double wage, Sex sex, int age) {
    const AgentId id = add(household, age, Status::Employed, sex);
    auto &a = s.agent(id);
    a.hourly_wage = wage;
    a.last_wage = wage;
    return id;
}

void TinyWorld::parent(AgentId child, AgentId mother, AgentId father) {
    s.agent(child).mother = mother;
    s.agent(mother).children.push_back(child);
    if (father != kNoAgent) {
        s.agent(child).father = father;
        s.agent(father).children.push_back(child);
    }
}

void TinyWorld::couple(AgentId a, AgentId b) {
    s.agent(a).partner = b;
    s.agent(b).partner = a;
}

void TinyWorld::need(AgentId agent, CareNeedLevel level) { s.agent(agent).care_need = level; }

void TinyWorld::budget(HouseholdId household, double weekly) { s.household(household).care_budget = weekly; }

double chi_square_p(const std::vector<double> &observed, const std::vector<double> &probabilities) {
    double n = 0.0;
    for (double o : observed) {
        n += o;
    }
    double stat = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * probabilities[i];
        if (e <= 0.0) {
            if (observed[i] > 0.0) {
                return 0.0;
            }
            continue;
        }
        stat += (observed[i] - e) * (observed[i] - e) / e;
        ++cells;
    }
    if (cells < 2) {
        return 1.0;
    }
    const boost::math::chi_squared dist(cells - 1);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

std::filesystem::path source_dir() { return CARESIM_SOURCE_DIR; }

std::filesystem::path golden_dir() { return source_dir() / "tests" / "golden"; }

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<std::string> match_golden(const std::string &name, const std::string &text) {
    const auto path = golden_dir() / name;
    if (std::getenv("CARESIM_UPDATE_GOLDEN")) {
        std::filesystem::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << text;
        return std::nullopt;
    }
    if (!std::filesystem::exists(path)) {
        return "missing golden file " + path.string();
    }
    if (read_text(path) != text) {
        return "output differs from " + path.string();
    }
    return std::nullopt;
}

AllocationOutcome outcome_of(const CareLedger &ledger) {
    AllocationOutcome out;
    for (const auto &r : ledger.receivers) {
        out.receivers.push_back({r.id, {static_cast<int>(r.informal), static_cast<int>(r.formal)}});
    }
    for (const auto &sp : ledger.suppliers) {
        out.suppliers.push_back({sp.id, static_cast<int>(sp.informal)});
    }
    return out;
}

namespace {

constexpr double kEps = 1e-9;

// Weekly informal hours by status (teenager, student, employed, unemployed,
// retired) and kinship distance 0..3.
constexpr double kTable2[5][4] = {
    {16, 0, 0, 0}, {24, 16, 8, 4}, {28, 20, 12, 8}, {32, 24, 16, 8}, {48, 36, 20, 10}};

int status_row(Status s) {
    switch (s) {
    case Status::Teenager: return 0;
    case Status::Student: return 1;
    case Status::Employed: return 2;
    case Status::Unemployed: return 3;
    case Status::Retired: return 4;
    case Status::Child: break;
    }
    return -1;
}

double floor_q(double hours, double q) { return std::floor(hours / q + kEps) * q; }

// Ancestors up to grandparents with their generation gap, self at 0.
std::vector<std::pair<AgentId, int>> ancestors(const SimulationState &s, AgentId id) {
    std::vector<std::pair<AgentId, int>> out{{id, 0}};
    for (AgentId p : {s.agent(id).mother, s.agent(id).father}) {
        if (p == kNoAgent) {
            continue;
        }
        out.push_back({p, 1});
        for (AgentId g : {s.agent(p).mother, s.agent(p).father}) {
            if (g != kNoAgent) {
                out.push_back({g, 2});
            }
        }
    }
    return out;
}

// Degree of kinship from generation gaps to a common ancestor.
int degree(int up, int down) {
    if (up + down == 1) {
        return 1;  // parent or child
    }
    if ((up == 2 && down == 0) || (up == 0 && down == 2) || (up == 1 && down == 1)) {
        return 2;  // grandparent, grandchild, sibling
    }
    if ((up == 2 && down == 1) || (up == 1 && down == 2)) {
        return 3;  // uncle or aunt, nephew or niece
    }
    return 99;
}

} // namespace

std::map<HouseholdId, int> kin_distances(const SimulationState &s, AgentId owner) {
    std::map<HouseholdId, int> out;
    out[s.agent(owner).household] = 0;
    const auto mine = ancestors(s, owner);
    for (const auto &a : s.agents) {
        if (!a.alive || a.id == owner) {
            continue;
        }
        int best = 99;
        for (const auto &[x, up] : mine) {
            for (const auto &[y, down] : ancestors(s, a.id)) {
                if (x == y) {
                    best = std::min(best, degree(up, down));
                }
            }
        }
        if (best > 3) {
            continue;
        }
        auto [it, fresh] = out.emplace(a.household, best);
        if (!fresh) {
            it->second = std::min(it->second, best);
        }
    }
    return out;
}

namespace {

struct Instance {
    double q = 4.0;
    double price = 15.0;
    double alpha = 0.5;
    double week = 40.0;
    double tax = 0.2;
    bool deduction = false;

    struct Member {
        AgentId id = kNoAgent;
        HouseholdId home = kNoHousehold;
        int row = -1;
        bool needs_care = false;
        bool employed = false;
        double wage = 0.0;
    };
    struct Rec {
        AgentId id = kNoAgent;
        TownId town = kNoTown;
        std::vector<std::pair<HouseholdId, int>> net;
    };
    std::vector<Member> members;
    std::vector<Rec> recs;
    std::vector<HouseholdId> homes;
    std::vector<TownId> towns;
    std::vector<std::vector<std::size_t>> home_members;  // member indices per home index
};

struct Dyn {
    std::vector<double> unmet, informal, formal;  // per receiver
    std::vector<double> used, worked, supplied;   // per member
    std::vector<double> left, refund;             // per home

    std::string key() const {
        std::string k;
        for (const auto *v : {&unmet, &informal, &formal, &used, &worked, &supplied, &left, &refund}) {
            k.append(reinterpret_cast<const char *>(v->data()), v->size() * sizeof(double));
        }
        return k;
    }
};

struct Offer {
    std::array<double, 6> hours{};
    // out-of-income route
    bool time_off = false;
    std::size_t member = 0;
    double unit = 0.0;
    double total() const {
        double t = 0.0;
        for (double h : hours) {
            t += h;
        }
        return t;
    }
};

class Enumerator {
public:
    Enumerator(const Instance &inst) : in_(inst) {}

    std::map<AllocationOutcome, double> run(const Dyn &d) {
        auto it = memo_.find(d.key());
        if (it != memo_.end()) {
            return it->second;
        }
        std::map<AllocationOutcome, double> out;
        double pool = 0.0;
        std::vector<std::size_t> live;
        for (std::size_t r = 0; r < in_.recs.size(); ++r) {
            if (d.unmet[r] > kEps && has_supply(d, r)) {
                live.push_back(r);
                pool += d.unmet[r];
            }
        }
        if (live.empty()) {
            out[terminal(d)] = 1.0;
        }
        for (std::size_t r : live) {
            const double pr = d.unmet[r] / pool;
            std::vector<std::pair<std::size_t, int>> cands;
            std::vector<Offer> offers;
            std::vector<double> w;
            double wsum = 0.0;
            for (const auto &[h, dist] : in_.recs[r].net) {
                const auto o = offer(d, r, h, dist);
                if (o.total() <= 0.0) {
                    continue;
                }
                cands.push_back({h, dist});
                offers.push_back(o);
                w.push_back(std::exp(-in_.alpha * dist) * o.total());
                wsum += w.back();
            }
            for (std::size_t c = 0; c < cands.size(); ++c) {
                const double ph = w[c] / wsum;
                const auto &o = offers[c];
                for (std::size_t src = 0; src < 6; ++src) {
                    if (o.hours[src] <= 0.0) {
                        continue;
                    }
                    const double p = pr * ph * o.hours[src] / o.total();
                    Dyn next = apply(d, r, cands[c].first, cands[c].second, src, o);
                    for (const auto &[k, v] : run(next)) {
                        out[k] += p * v;
                    }
                }
            }
        }
        memo_.emplace(d.key(), out);
        return out;
    }

private:
    std::size_t home_index(HouseholdId h) const {
        return static_cast<std::size_t>(std::find(in_.homes.begin(), in_.homes.end(), h) - in_.homes.begin());
    }

    double residual(const Dyn &d, std::size_t r, std::size_t m, int dist) const {
        const auto &mem = in_.members[m];
        if (mem.id == in_.recs[r].id || mem.needs_care || mem.row < 0) {
            return 0.0;
        }
        return std::max(0.0, floor_q(kTable2[mem.row][dist], in_.q) - d.used[m]);
    }

    Offer offer(const Dyn &d, std::size_t r, HouseholdId h, int dist) const {
        Offer o;
        const std::size_t hi = home_index(h);
        const bool same_town = in_.towns[hi] == in_.recs[r].town;
        if (same_town) {
            for (std::size_t m : in_.home_members[hi]) {
                if (in_.members[m].row >= 0) {
                    o.hours[std::size_t(in_.members[m].row)] += residual(d, r, m, dist);
                }
            }
        }
        if (dist > 1) {
            return o;
        }
        bool found = false;
        for (std::size_t m : in_.home_members[hi]) {
            const auto &mem = in_.members[m];
            if (mem.id == in_.recs[r].id || !mem.employed || mem.needs_care || d.worked[m] < in_.q - kEps) {
                continue;
            }
            if (!found || mem.wage < in_.members[o.member].wage ||
                (mem.wage == in_.members[o.member].wage && mem.id < in_.members[o.member].id)) {
                o.member = m;
                found = true;
            }
        }
        const double gross = in_.price * in_.q;
        const bool refunded = in_.deduction && d.refund[hi] + kEps >= gross * in_.tax;
        const double unit = refunded ? in_.price * (1.0 - in_.tax) : in_.price;
        if (found && same_town && in_.members[o.member].wage <= unit) {
            const double wage = in_.members[o.member].wage;
            o.time_off = true;
            o.unit = wage;
            const double affordable = wage > 0.0 ? floor_q(d.left[hi] / wage, in_.q) : 0.0;
            o.hours[5] = std::min(affordable, floor_q(d.worked[o.member], in_.q));
        } else {
            o.unit = unit;
            o.hours[5] = floor_q(d.left[hi] / unit, in_.q);
        }
        return o;
    }

    bool has_supply(const Dyn &d, std::size_t r) const {
        for (const auto &[h, dist] : in_.recs[r].net) {
            if (offer(d, r, h, dist).total() > 0.0) {
                return true;
            }
        }
        return false;
    }

    Dyn apply(const Dyn &d, std::size_t r, HouseholdId h, int dist, std::size_t src, const Offer &o) const {
        Dyn n = d;
        const std::size_t hi = home_index(h);
        const double q = in_.q;
        if (src < 5) {
            std::size_t best = 0;
            double best_res = 0.0;
            bool found = false;
            for (std::size_t m : in_.home_members[hi]) {
                if (in_.members[m].row != static_cast<int>(src)) {
                    continue;
                }
                const double res = residual(d, r, m, dist);
                if (res <= 0.0) {
                    continue;
                }
                if (!found || res > best_res + kEps ||
                    (std::abs(res - best_res) <= kEps && in_.members[m].id < in_.members[best].id)) {
                    best = m;
                    best_res = res;
                    found = true;
                }
            }
            n.used[best] += q;
            n.supplied[best] += q;
            n.informal[r] += q;
        } else if (o.time_off) {
            n.worked[o.member] -= q;
            n.left[hi] -= o.unit * q;
            n.supplied[o.member] += q;
            n.informal[r] += q;
        } else {
            const double gross = in_.price * q;
            n.refund[hi] -= gross - o.unit * q;
            n.left[hi] -= o.unit * q;
            n.formal[r] += q;
        }
        n.unmet[r] -= q;
        return n;
    }

    AllocationOutcome terminal(const Dyn &d) const {
        AllocationOutcome out;
        for (std::size_t r = 0; r < in_.recs.size(); ++r) {
            out.receivers.push_back(
                {in_.recs[r].id, {static_cast<int>(std::lround(d.informal[r])), static_cast<int>(std::lround(d.formal[r]))}});
        }
        for (std::size_t m = 0; m < in_.members.size(); ++m) {
            if (d.supplied[m] > 0.0) {
                out.suppliers.push_back({in_.members[m].id, static_cast<int>(std::lround(d.supplied[m]))});
            }
        }
        return out;
    }

    const Instance &in_;
    std::map<std::string, std::map<AllocationOutcome, double>> memo_;
};

} // namespace

std::map<AllocationOutcome, double> enumerate_allocation(const SimulationState &s, int year) {
    const auto &c = s.cfg();
    Instance in;
    in.q = c.quantum_hours;
    in.price = c.care_price;
    in.alpha = c.kinship_decay;
    in.week = c.weekly_work_hours;
    in.tax = c.tax_rate;
    in.deduction = c.policy == Policy::TaxDeduction && year >= c.policy_year;
    Dyn d;
    for (const auto &h : s.households) {
        if (!h.active) {
            continue;
        }
        in.homes.push_back(h.id);
        in.towns.push_back(h.town);
        in.home_members.emplace_back();
        d.left.push_back(std::max(0.0, h.care_budget));
        d.refund.push_back(in.deduction ? c.tax_rate * h.employment_income : 0.0);
    }
    for (const auto &a : s.agents) {
        if (!a.alive) {
            continue;
        }
        Instance::Member m;
        m.id = a.id;
        m.home = a.household;
        m.row = status_row(a.status);
        m.needs_care = a.care_need != CareNeedLevel::None;
        m.employed = a.status == Status::Employed;
        m.wage = a.hourly_wage;
        const auto hi = static_cast<std::size_t>(std::find(in.homes.begin(), in.homes.end(), a.household) -
                                                 in.homes.begin());
        in.home_members[hi].push_back(in.members.size());
        in.members.push_back(m);
        d.used.push_back(0.0);
        d.worked.push_back(a.status == Status::Employed ? a.worked_fraction * c.weekly_work_hours : 0.0);
        d.supplied.push_back(0.0);
        if (a.care_need != CareNeedLevel::None) {
            Instance::Rec r;
            r.id = a.id;
            r.town = s.household(a.household).town;
            for (const auto &[h, dist] : kin_distances(s, a.id)) {
                r.net.push_back({h, dist});
            }
            in.recs.push_back(r);
            d.unmet.push_back(care_hours(a.care_need));
            d.informal.push_back(0.0);
            d.formal.push_back(0.0);
        }
    }
    Enumerator e(in);
    return e.run(d);
}

TinyWorld random_instance(std::uint64_t seed, bool deduction) {
    std::mt19937_64 g(seed);
    auto pick = [&](std::initializer_list<double> xs) {
        std::vector<double> v(xs);
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(g)];
    };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(g) < p; };
    auto status = [&]() {
        const int k = std::uniform_int_distribution<int>(0, 2)(g);
        return k == 0 ? Status::Employed : k == 1 ? Status::Unemployed : Status::Retired;
    };

    ScenarioConfig c = neutral_config();
    if (deduction) {
        c.policy = Policy::TaxDeduction;
        c.policy_year = 2000;
    }
    TinyWorld w(2, 6, c);
    const HouseholdId h0 = w.home(0);
    const HouseholdId h1 = w.home(coin(0.7) ? 0 : 1);
    const bool third = coin(0.6);
    const HouseholdId h2 = third ? w.home(coin(0.5) ? 0 : 1) : kNoHousehold;

    const AgentId gran = w.add(h0, 80, Status::Retired, Sex::Female);
    w.need(gran, coin(0.5) ? CareNeedLevel::Low : CareNeedLevel::Moderate);
    if (coin(0.5)) {
        const AgentId grandad = w.add(h0, 82, Status::Retired, Sex::Male);
        w.couple(gran, grandad);
        if (coin(0.3)) {
            w.need(grandad, CareNeedLevel::Low);
        }
    }
    auto grown_child = [&](HouseholdId h) {
        const Status st = status();
        const AgentId id = st == Status::Employed ? w.worker(h, pick({8, 12, 14, 20}), Sex::Female, 50)
                                                  : w.add(h, st == Status::Retired ? 66 : 50, st);
        w.parent(id, gran);
        return id;
    };
    const AgentId child = grown_child(h1);
    if (coin(0.5)) {
        const AgentId spouse = w.worker(h1, pick({10, 13, 18}), Sex::Male, 52);
        w.couple(child, spouse);
        if (coin(0.5)) {
            const AgentId kid = w.add(h1, coin(0.5) ? 14 : 18, Status::Teenager);
            if (w.s.agent(kid).age == 18) {
                w.s.agent(kid).status = Status::Student;
            }
            w.parent(kid, child, spouse);
        }
    }
    if (coin(0.25)) {
        w.need(child, CareNeedLevel::Low);
    }
    if (third) {
        const AgentId other = grown_child(h2);
        (void)other;
    }
    for (HouseholdId h : {h0, h1, h2}) {
        if (h == kNoHousehold) {
            continue;
        }
        w.budget(h, pick({0, 40, 100, 250}));
        double income = 0.0;
        for (AgentId m : w.s.household(h).members) {
            const auto &a = w.s.agent(m);
            if (a.status == Status::Employed) {
                income += a.hourly_wage * c.weekly_work_hours * a.worked_fraction;
            }
        }
        w.s.household(h).employment_income = income;
    }
    return w;
}

} // namespace caresim::test
