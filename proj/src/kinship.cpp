#include "caresim/kinship.h"

#include <algorithm>

namespace caresim {

int KinshipNetwork::distance_of(HouseholdId household) const noexcept {
    for (int d = 0; d < kKinshipDistances; ++d) {
        const auto &v = by_distance[static_cast<std::size_t>(d)];
        if (std::binary_search(v.begin(), v.end(), household)) {
            return d;
        }
    }
    return -1;
}

std::size_t KinshipNetwork::size() const noexcept {
    std::size_t n = 0;
    for (const auto &v : by_distance) {
        n += v.size();
    }
    return n;
}

namespace {

void push_parents(const SimulationState &s, AgentId id, std::vector<AgentId> &out) {
    const auto &a = s.agent(id);
    if (a.mother != kNoAgent) {
        out.push_back(a.mother);
    }
    if (a.father != kNoAgent) {
        out.push_back(a.father);
    }
}

void push_children(const SimulationState &s, AgentId id, std::vector<AgentId> &out) {
    const auto &c = s.agent(id).children;
    out.insert(out.end(), c.begin(), c.end());
}

std::vector<AgentId> siblings_of(const SimulationState &s, AgentId id) {
    std::vector<AgentId> parents;
    push_parents(s, id, parents);
    std::vector<AgentId> out;
    for (AgentId p : parents) {
        for (AgentId c : s.agent(p).children) {
            if (c != id) {
                out.push_back(c);
            }
        }
    }
    return out;
}

void dedupe(std::vector<AgentId> &v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

std::array<std::vector<AgentId>, kKinshipDistances> relatives_by_degree(const SimulationState &s,
                                                                        AgentId id) {
    std::array<std::vector<AgentId>, kKinshipDistances> out;
    std::vector<AgentId> parents;
    push_parents(s, id, parents);
    std::vector<AgentId> children;
    push_children(s, id, children);

    auto &d1 = out[1];
    d1.insert(d1.end(), parents.begin(), parents.end());
    d1.insert(d1.end(), children.begin(), children.end());

    auto &d2 = out[2];
    for (AgentId p : parents) {
        push_parents(s, p, d2);
    }
    for (AgentId c : children) {
        push_children(s, c, d2);
    }
    const auto sibs = siblings_of(s, id);
    d2.insert(d2.end(), sibs.begin(), sibs.end());

    auto &d3 = out[3];
    for (AgentId p : parents) {
        const auto aunts = siblings_of(s, p);
        d3.insert(d3.end(), aunts.begin(), aunts.end());
    }
    for (AgentId sib : sibs) {
        push_children(s, sib, d3);
    }
    for (int d = 1; d < kKinshipDistances; ++d) {
        auto &v = out[static_cast<std::size_t>(d)];
        dedupe(v);
        v.erase(std::remove(v.begin(), v.end(), id), v.end());
    }
    return out;
}

KinshipNetwork build_kinship_network(const SimulationState &s, AgentId id) {
    KinshipNetwork net;
    net.owner = id;
    const HouseholdId own = s.agent(id).household;
    net.by_distance[0].push_back(own);
    std::vector<HouseholdId> placed{own};
    const auto rel = relatives_by_degree(s, id);
    for (int d = 1; d < kKinshipDistances; ++d) {
        auto &bucket = net.by_distance[static_cast<std::size_t>(d)];
        for (AgentId r : rel[static_cast<std::size_t>(d)]) {
            if (!s.is_alive(r)) {
                continue;
            }
            const HouseholdId h = s.agent(r).household;
            if (std::find(placed.begin(), placed.end(), h) == placed.end()) {
                bucket.push_back(h);
            }
        }
        std::sort(bucket.begin(), bucket.end());
        bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
        placed.insert(placed.end(), bucket.begin(), bucket.end());
    }
    return net;
}

std::vector<KinEntry> household_kinship(const SimulationState &s, HouseholdId household) {
    std::vector<KinEntry> out;
    for (AgentId m : s.household(household).members) {
        const auto net = build_kinship_network(s, m);
        for (int d = 0; d < kKinshipDistances; ++d) {
            for (HouseholdId h : net.by_distance[static_cast<std::size_t>(d)]) {
                auto it = std::find_if(out.begin(), out.end(),
                                       [&](const KinEntry &e) { return e.household == h; });
                if (it == out.end()) {
                    out.push_back({h, d});
                } else {
                    it->distance = std::min(it->distance, d);
                }
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const KinEntry &a, const KinEntry &b) { return a.household < b.household; });
    return out;
}

} // namespace caresim
