#include "caresim/ledger.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace caresim {

std::string_view to_string(CareSource s) noexcept {
    switch (s) {
    case CareSource::Teenager: return "teenager";
    case CareSource::Student: return "student";
    case CareSource::Employed: return "employed";
    case CareSource::Unemployed: return "unemployed";
    case CareSource::Retired: return "retired";
    case CareSource::OutOfIncome: return "out_of_income";
    }
    return "?";
}

const ReceiverSummary *CareLedger::receiver(AgentId id) const noexcept {
    auto it = std::lower_bound(receivers.begin(), receivers.end(), id,
                               [](const ReceiverSummary &r, AgentId v) { return r.id < v; });
    return it != receivers.end() && it->id == id ? &*it : nullptr;
}

const HouseholdSpend *CareLedger::spend(HouseholdId id) const noexcept {
    auto it = std::lower_bound(spends.begin(), spends.end(), id,
                               [](const HouseholdSpend &r, HouseholdId v) { return r.id < v; });
    return it != spends.end() && it->id == id ? &*it : nullptr;
}

double CareLedger::hours_from(HouseholdId household, AgentId receiver_id) const noexcept {
    double total = 0.0;
    for (const auto &q : quanta) {
        if (q.receiver == receiver_id && q.supplier_household == household) {
            total += q.hours;
        }
    }
    return total;
}

std::optional<std::string> verify_ledger(const CareLedger &ledger, double quantum_hours) {
    constexpr double eps = 1e-9;
    std::map<AgentId, std::pair<double, double>> by_receiver;  // informal, formal
    std::map<AgentId, double> by_supplier;
    for (const auto &q : ledger.quanta) {
        if (std::abs(q.hours - quantum_hours) > eps) {
            return "quantum with " + std::to_string(q.hours) + " hours";
        }
        if (q.kind == CareKind::Formal) {
            if (q.source != CareSource::OutOfIncome || !(q.cost > 0.0)) {
                return "formal quantum must come from out-of-income with positive cost";
            }
            by_receiver[q.receiver].second += q.hours;
        } else {
            if (q.cost != 0.0 || q.supplier_agent == kNoAgent) {
                return "informal quantum must name a supplier and cost nothing";
            }
            by_receiver[q.receiver].first += q.hours;
            by_supplier[q.supplier_agent] += q.hours;
        }
    }
    double state_total = 0.0;
    for (const auto &r : ledger.receivers) {
        const auto agg = by_receiver[r.id];
        if (std::abs(r.informal - agg.first) > eps) {
            return "receiver " + std::to_string(r.id) + " informal summary mismatch";
        }
        if (std::abs(r.formal - r.state_funded - agg.second) > eps) {
            return "receiver " + std::to_string(r.id) + " formal summary mismatch";
        }
        if (std::abs(r.informal + r.formal + r.unmet - r.need) > eps) {
            return "receiver " + std::to_string(r.id) + " informal + formal + unmet != need";
        }
        if (r.need != care_hours(r.level) || r.unmet < -eps) {
            return "receiver " + std::to_string(r.id) + " need does not match care level";
        }
        const double received = r.informal + r.formal;
        if (std::abs(std::fmod(received, quantum_hours)) > eps &&
            std::abs(received - r.need) > eps) {
            return "receiver " + std::to_string(r.id) + " received a non-quantum total";
        }
        state_total += r.state_funded;
    }
    for (const auto &[id, agg] : by_receiver) {
        if (ledger.receiver(id) == nullptr) {
            return "quantum to unknown receiver " + std::to_string(id);
        }
    }
    if (std::abs(state_total - ledger.state_funded_hours) > eps) {
        return "state funded total mismatch";
    }
    for (const auto &s : ledger.suppliers) {
        if (std::abs(by_supplier[s.id] - s.informal) > eps) {
            return "supplier " + std::to_string(s.id) + " summary mismatch";
        }
    }
    for (const auto &sp : ledger.spends) {
        if (sp.net_spend > sp.budget + eps) {
            return "household " + std::to_string(sp.id) + " spent beyond its care budget";
        }
    }
    return std::nullopt;
}

} // namespace caresim
