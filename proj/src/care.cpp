#include "caresim/care.h"

#include "caresim/economy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace caresim {

namespace {

constexpr double kEps = 1e-9;

constexpr std::array<std::array<double, kKinshipDistances>, 5> kSupplyTable{{
    {16.0, 0.0, 0.0, 0.0},   // teenager
    {24.0, 16.0, 8.0, 4.0},  // student
    {28.0, 20.0, 12.0, 8.0}, // employed, before time off
    {32.0, 24.0, 16.0, 8.0}, // unemployed
    {48.0, 36.0, 20.0, 10.0} // retired
}};

double floor_to_quantum(double hours, double q) noexcept {
    return std::floor(hours / q + kEps) * q;
}

} // namespace

std::optional<CareSource> source_for(Status status) noexcept {
    switch (status) {
    case Status::Teenager: return CareSource::Teenager;
    case Status::Student: return CareSource::Student;
    case Status::Employed: return CareSource::Employed;
    case Status::Unemployed: return CareSource::Unemployed;
    case Status::Retired: return CareSource::Retired;
    case Status::Child: break;
    }
    return std::nullopt;
}

double supply_table_hours(Status status, int distance) noexcept {
    const auto src = source_for(status);
    if (!src || distance < 0 || distance >= kKinshipDistances) {
        return 0.0;
    }
    return kSupplyTable[static_cast<std::size_t>(*src)][static_cast<std::size_t>(distance)];
}

double supply_cap(Status status, int distance, int quantum_hours) noexcept {
    return floor_to_quantum(supply_table_hours(status, distance), static_cast<double>(quantum_hours));
}

double transition_probability(const Agent &a, const RateTables &t, const ScenarioConfig &c, int year) {
    double base = 0.0;
    if (a.care_need == CareNeedLevel::Critical) {
        return 0.0;
    }
    if (a.care_need == CareNeedLevel::None) {
        base = t.care_onset.at(a.age, a.sex, a.ses, year);
    } else {
        base = t.care_progression.at(a.age, a.sex, a.ses, year) *
               c.progression_multiplier[std::size_t(index_of(a.care_need) - 1)];
    }
    return std::clamp(base * (1.0 + c.unmet_frailty * std::max(0.0, a.unmet_history)), 0.0, 1.0);
}

CareNeedLevel care_transition(const Agent &a, const RateTables &t, const ScenarioConfig &c, int year,
                              Rng &rng) {
    const double p = transition_probability(a, t, c, year);
    if (p > 0.0 && rng.keyed_bernoulli(p, std::uint64_t(DrawTag::CareTransition), std::uint64_t(year), a.id)) {
        return static_cast<CareNeedLevel>(index_of(a.care_need) + 1);
    }
    return a.care_need;
}

double average_unmet_share(const Agent &a) noexcept {
    return a.unmet_share_weight > 0.0 ? a.unmet_share_sum / a.unmet_share_weight : 0.0;
}

HospitalStay hospital_days(const Agent &a, const ScenarioConfig &c) noexcept {
    HospitalStay stay;
    stay.days = c.hospital_base_days[std::size_t(index_of(a.care_need))] *
                (1.0 + c.hospital_unmet_gamma * average_unmet_share(a));
    stay.cost = stay.days * c.hospital_cost_per_day;
    return stay;
}

double SourceSupply::total() const noexcept {
    return std::accumulate(hours.begin(), hours.end(), 0.0);
}

double SourceSupply::informal() const noexcept {
    return total() - hours[static_cast<std::size_t>(CareSource::OutOfIncome)];
}

CareAllocator::CareAllocator(SimulationState &state, int year, const std::vector<AgentId> &state_funded)
    : state_(state), year_(year), q_(static_cast<double>(state.cfg().quantum_hours)),
      deduction_(deduction_active(state.cfg(), year)) {
    const auto &c = state_.cfg();
    used_.assign(state_.agents.size(), 0.0);
    budgets_.resize(state_.households.size());
    for (const auto &h : state_.households) {
        if (!h.active) {
            continue;
        }
        auto &b = budgets_[std::size_t(h.id)];
        b.budget = std::max(0.0, h.care_budget);
        b.left = b.budget;
        b.refund_left = deduction_ ? c.tax_rate * h.employment_income : 0.0;
    }
    std::vector<AgentId> funded(state_funded);
    std::sort(funded.begin(), funded.end());
    for (const auto &a : state_.agents) {
        if (!a.alive || a.care_need == CareNeedLevel::None) {
            continue;
        }
        Receiver r;
        r.id = a.id;
        r.level = a.care_need;
        r.town = state_.household(a.household).town;
        r.need = care_hours(a.care_need);
        r.unmet = r.need;
        if (std::binary_search(funded.begin(), funded.end(), a.id)) {
            r.formal = r.need;
            r.state_funded = r.need;
            r.unmet = 0.0;
            state_funded_hours_ += r.need;
            state_funded_cost_ += r.need * c.care_price;
        } else {
            r.network = build_kinship_network(state_, a.id);
        }
        receivers_.push_back(std::move(r));
    }
    tree_.assign(receivers_.size() + 1, 0.0);
    weight_.assign(receivers_.size(), 0.0);
    for (std::size_t i = 0; i < receivers_.size(); ++i) {
        fenwick_set(i, receivers_[i].unmet);
    }
}

void CareAllocator::fenwick_set(std::size_t i, double w) {
    const double delta = w - weight_[i];
    weight_[i] = w;
    total_ += delta;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) {
        tree_[k] += delta;
    }
}

std::size_t CareAllocator::fenwick_find(double target) const {
    std::size_t pos = 0;
    std::size_t mask = 1;
    while (mask * 2 < tree_.size()) {
        mask *= 2;
    }
    for (; mask > 0; mask /= 2) {
        const std::size_t next = pos + mask;
        if (next < tree_.size() && tree_[next] <= target) {
            pos = next;
            target -= tree_[next];
        }
    }
    // pos is the count of entries whose prefix sum is <= target; skip zero
    // weights left behind by rounding.
    while (pos < weight_.size() && weight_[pos] <= 0.0) {
        ++pos;
    }
    if (pos >= weight_.size()) {
        pos = weight_.size() - 1;
        while (pos > 0 && weight_[pos] <= 0.0) {
            --pos;
        }
    }
    return pos;
}

const CareAllocator::Receiver &CareAllocator::receiver_at(AgentId id) const {
    auto it = std::lower_bound(receivers_.begin(), receivers_.end(), id,
                               [](const Receiver &r, AgentId v) { return r.id < v; });
    if (it == receivers_.end() || it->id != id) {
        throw std::out_of_range("agent " + std::to_string(id) + " is not a care receiver");
    }
    return *it;
}

const KinshipNetwork &CareAllocator::network(AgentId receiver) const {
    return receiver_at(receiver).network;
}

double CareAllocator::unmet(AgentId receiver) const { return receiver_at(receiver).unmet; }

double CareAllocator::used(AgentId id) const {
    return static_cast<std::size_t>(id) < used_.size() ? used_[std::size_t(id)] : 0.0;
}

double CareAllocator::member_residual(const Receiver &r, const Agent &m, int distance) const {
    if (m.id == r.id || m.care_need != CareNeedLevel::None) {
        return 0.0;
    }
    const double cap = supply_cap(m.status, distance, state_.cfg().quantum_hours);
    return std::max(0.0, cap - used(m.id));
}

CareAllocator::Route CareAllocator::out_of_income_route(const Receiver &r, HouseholdId household,
                                                        int distance) const {
    Route route;
    if (distance > 1) {
        return route;
    }
    const auto &c = state_.cfg();
    const auto &b = budgets_[std::size_t(household)];
    const auto &h = state_.household(household);

    AgentId cheapest = kNoAgent;
    double wmin = 0.0;
    for (AgentId id : h.members) {
        const auto &m = state_.agent(id);
        if (m.id == r.id || m.status != Status::Employed || m.care_need != CareNeedLevel::None ||
            m.worked_fraction * c.weekly_work_hours < q_ - kEps) {
            continue;
        }
        if (cheapest == kNoAgent || m.hourly_wage < wmin || (m.hourly_wage == wmin && id < cheapest)) {
            cheapest = id;
            wmin = m.hourly_wage;
        }
    }
    // The household compares the wage with what formal care would cost it,
    // net of any tax refund still available.
    const double refund = c.care_price * q_ * c.tax_rate;
    const double formal_unit =
        deduction_ && b.refund_left + kEps >= refund ? c.care_price * (1.0 - c.tax_rate) : c.care_price;
    if (cheapest != kNoAgent && wmin <= formal_unit) {
        if (h.town != r.town) {
            // Informal time off needs the same town; fall through to formal.
        } else {
            route.kind = CareKind::Informal;
            route.member = cheapest;
            route.unit_cost = wmin;
            const double hours_left = state_.agent(cheapest).worked_fraction * c.weekly_work_hours;
            const double affordable = wmin > 0.0 ? floor_to_quantum(b.left / wmin, q_) : 0.0;
            route.hours = std::min(affordable, floor_to_quantum(hours_left, q_));
            return route;
        }
    }
    route.kind = CareKind::Formal;
    route.unit_cost = formal_unit;
    route.hours = route.unit_cost > 0.0 ? floor_to_quantum(b.left / route.unit_cost, q_) : 0.0;
    return route;
}

SourceSupply CareAllocator::supply_for(const Receiver &r, HouseholdId household, int distance) const {
    SourceSupply s;
    const auto &h = state_.household(household);
    if (h.town == r.town) {
        for (AgentId id : h.members) {
            const auto &m = state_.agent(id);
            const auto src = source_for(m.status);
            if (src) {
                s[*src] += member_residual(r, m, distance);
            }
        }
    }
    s[CareSource::OutOfIncome] = out_of_income_route(r, household, distance).hours;
    return s;
}

SourceSupply CareAllocator::available_supply(AgentId receiver, HouseholdId household) const {
    const auto &r = receiver_at(receiver);
    const int d = r.network.distance_of(household);
    if (d < 0) {
        return {};
    }
    return supply_for(r, household, d);
}

AgentId CareAllocator::pick_member(const Receiver &r, HouseholdId household, int distance,
                                   CareSource source) const {
    AgentId best = kNoAgent;
    double best_residual = 0.0;
    for (AgentId id : state_.household(household).members) {
        const auto &m = state_.agent(id);
        if (source_for(m.status) != source) {
            continue;
        }
        const double res = member_residual(r, m, distance);
        if (res > best_residual + kEps || (std::abs(res - best_residual) <= kEps && res > 0.0 && id < best)) {
            best = id;
            best_residual = res;
        }
    }
    return best;
}

std::optional<AllocationStep> CareAllocator::step(Rng &rng) {
    const auto &c = state_.cfg();
    std::vector<double> weights;
    std::vector<std::pair<HouseholdId, int>> candidates;
    std::vector<SourceSupply> supplies;
    while (true) {
        const double total = total_;
        if (total <= 0.0) {
            return std::nullopt;
        }
        const std::size_t idx = fenwick_find(rng.uniform() * total);
        auto &r = receivers_[idx];

        weights.clear();
        candidates.clear();
        supplies.clear();
        for (int d = 0; d < kKinshipDistances; ++d) {
            const double decay = std::exp(-c.kinship_decay * d);
            for (HouseholdId h : r.network.by_distance[std::size_t(d)]) {
                auto s = supply_for(r, h, d);
                const double t = s.total();
                if (t <= 0.0) {
                    continue;
                }
                candidates.emplace_back(h, d);
                supplies.push_back(s);
                weights.push_back(decay * t);
            }
        }
        if (weights.empty()) {
            fenwick_set(idx, 0.0);
            continue;
        }
        const std::size_t hi = rng.weighted_index(weights);
        const auto [household, distance] = candidates[hi];
        const auto &supply = supplies[hi];
        const auto source = static_cast<CareSource>(rng.weighted_index(supply.hours));

        CareQuantum quantum;
        quantum.receiver = r.id;
        quantum.supplier_household = household;
        quantum.source = source;
        quantum.distance = distance;
        quantum.hours = q_;

        if (source != CareSource::OutOfIncome) {
            const AgentId m = pick_member(r, household, distance, source);
            used_[std::size_t(m)] += q_;
            quantum.kind = CareKind::Informal;
            quantum.supplier_agent = m;
        } else {
            const Route route = out_of_income_route(r, household, distance);
            auto &b = budgets_[std::size_t(household)];
            if (route.kind == CareKind::Informal) {
                auto &m = state_.agent(route.member);
                m.worked_fraction = std::max(0.0, m.worked_fraction - q_ / c.weekly_work_hours);
                const double forgone = route.unit_cost * q_;
                b.left -= forgone;
                b.net_spend += forgone;
                b.forgone += forgone;
                quantum.kind = CareKind::Informal;
                quantum.supplier_agent = route.member;
            } else {
                const double gross = c.care_price * q_;
                const double net = route.unit_cost * q_;
                b.refund_left -= gross - net;
                b.left -= net;
                b.formal_spend += gross;
                b.net_spend += net;
                quantum.kind = CareKind::Formal;
                quantum.cost = gross;
            }
        }
        if (quantum.kind == CareKind::Informal) {
            r.informal += q_;
        } else {
            r.formal += q_;
        }
        r.unmet -= q_;
        fenwick_set(idx, std::max(0.0, r.unmet));
        quanta_.push_back(quantum);
        return AllocationStep{r.id, household, source, quantum.kind, quantum.supplier_agent};
    }
}

void CareAllocator::run(Rng &rng) {
    while (step(rng)) {
    }
}

CareLedger CareAllocator::finish() {
    CareLedger ledger;
    ledger.year = year_;
    ledger.quanta = std::move(quanta_);
    ledger.state_funded_hours = state_funded_hours_;
    ledger.state_funded_cost = state_funded_cost_;
    for (const auto &r : receivers_) {
        ledger.receivers.push_back({r.id, r.level, r.need, r.informal, r.formal, r.state_funded,
                                    std::max(0.0, r.unmet)});
    }
    std::vector<double> supplied(state_.agents.size(), 0.0);
    for (const auto &q : ledger.quanta) {
        if (q.kind == CareKind::Informal) {
            supplied[std::size_t(q.supplier_agent)] += q.hours;
        }
    }
    for (auto &a : state_.agents) {
        a.informal_supplied = supplied[std::size_t(a.id)];
        if (a.informal_supplied > 0.0) {
            ledger.suppliers.push_back({a.id, a.informal_supplied});
        }
    }
    for (std::size_t i = 0; i < budgets_.size(); ++i) {
        const auto &b = budgets_[i];
        if (b.budget > 0.0 || b.net_spend > 0.0) {
            ledger.spends.push_back({static_cast<HouseholdId>(i), b.budget, b.formal_spend, b.net_spend,
                                     b.forgone});
        }
    }
    return ledger;
}

CareLedger allocate_care(SimulationState &state, int year, Rng &rng,
                         const std::vector<AgentId> &state_funded) {
    CareAllocator alloc(state, year, state_funded);
    alloc.run(rng);
    return alloc.finish();
}

void record_unmet(SimulationState &state, const CareLedger &ledger) {
    const double keep = 1.0 - state.cfg().discount_rate;
    for (const auto &r : ledger.receivers) {
        auto &a = state.agent(r.id);
        a.unmet_history = a.unmet_history * keep + r.unmet;
        const double share = r.need > 0.0 ? r.unmet / r.need : 0.0;
        a.unmet_share_sum = a.unmet_share_sum * keep + share;
        a.unmet_share_weight = a.unmet_share_weight * keep + 1.0;
    }
}

void retire_for_ill_health(Agent &a, const ScenarioConfig &c) {
    const bool working_age = a.age >= c.min_working_age && a.age < c.retirement_age;
    const bool active = a.status == Status::Student || a.status == Status::Employed ||
                        a.status == Status::Unemployed;
    if (!working_age || !active) {
        return;
    }
    a.status = Status::Retired;
    a.ill_health_retirement = true;
    a.lost_working_years = c.retirement_age - a.age;
    a.hourly_wage = 0.0;
    a.worked_fraction = 0.0;
    a.pension = pension(a, c);
}

CareTransitionEvents care_transition_step(SimulationState &state, int year, Rng &rng) {
    const auto &c = state.cfg();
    CareTransitionEvents ev;
    for (auto &a : state.agents) {
        if (!a.alive) {
            continue;
        }
        if (a.care_need != CareNeedLevel::None) {
            const auto stay = hospital_days(a, c);
            ev.hospital_days += stay.days;
            ev.hospital_cost += stay.cost;
        }
        const auto next = care_transition(a, *state.tables, c, year, rng);
        if (next != a.care_need) {
            a.care_need = next;
            ++ev.transitions;
            retire_for_ill_health(a, c);
        }
    }
    state.counters.hospital_days += ev.hospital_days;
    state.counters.hospital_cost += ev.hospital_cost;
    return ev;
}

} // namespace caresim
