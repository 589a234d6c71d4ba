#include "caresim/world.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace caresim {

WorldGrid WorldGrid::build(const ScenarioConfig &config, Rng &rng) {
    WorldGrid grid;
    const double total_weight =
        std::accumulate(config.density_weights.begin(), config.density_weights.end(), 0.0);
    grid.towns_.resize(static_cast<std::size_t>(kGridRows * kGridCols));
    grid.density_.assign(config.density_weights.begin(), config.density_weights.end());
    for (int r = 0; r < kGridRows; ++r) {
        for (int c = 0; c < kGridCols; ++c) {
            const auto id = static_cast<std::size_t>(r * kGridCols + c);
            auto &town = grid.towns_[id];
            town.row = r;
            town.col = c;
            town.density_weight = config.density_weights[id];
            const double share = total_weight > 0.0 ? town.density_weight / total_weight : 0.0;
            int count = static_cast<int>(std::lround(share * config.total_houses));
            count = std::min(count, kMaxHousesPerTown);
            if (town.density_weight > 0.0) {
                count = std::max(count, 1);
            }
            for (int h = 0; h < count; ++h) {
                House house;
                house.town = static_cast<TownId>(id);
                house.bedrooms = config.min_bedrooms +
                                 static_cast<int>(rng.index(static_cast<std::size_t>(
                                     config.max_bedrooms - config.min_bedrooms + 1)));
                const auto hid = static_cast<HouseId>(grid.houses_.size());
                grid.houses_.push_back(house);
                town.houses.push_back(hid);
                town.vacant.push_back(hid);
            }
        }
    }
    return grid;
}

WorldGrid WorldGrid::from_towns(std::vector<Town> towns, std::vector<House> houses) {
    WorldGrid grid;
    grid.towns_ = std::move(towns);
    grid.houses_ = std::move(houses);
    for (auto &t : grid.towns_) {
        grid.density_.push_back(t.density_weight);
        t.vacant.clear();
        for (HouseId h : t.houses) {
            if (grid.houses_[std::size_t(h)].occupant == kNoHousehold) {
                t.vacant.push_back(h);
            }
        }
    }
    return grid;
}

int WorldGrid::grid_distance(TownId a, TownId b) const {
    const auto &ta = town(a);
    const auto &tb = town(b);
    return std::abs(ta.row - tb.row) + std::abs(ta.col - tb.col);
}

double WorldGrid::vacancy_share(TownId id) const {
    const auto &t = town(id);
    if (t.houses.empty()) {
        return 0.0;
    }
    return static_cast<double>(t.vacant.size()) / static_cast<double>(t.houses.size());
}

std::optional<HouseId> WorldGrid::random_vacant_house(TownId id, Rng &rng) const {
    const auto &t = town(id);
    if (t.vacant.empty()) {
        return std::nullopt;
    }
    return t.vacant[rng.index(t.vacant.size())];
}

std::optional<TownId> WorldGrid::nearest_town_with_vacancy(TownId from) const {
    std::optional<TownId> best;
    int best_dist = 0;
    for (TownId id = 0; id < town_count(); ++id) {
        if (!has_vacancy(id)) {
            continue;
        }
        const int d = grid_distance(from, id);
        if (!best || d < best_dist) {
            best = id;
            best_dist = d;
        }
    }
    return best;
}

TownId WorldGrid::random_town_by_density(Rng &rng) const {
    const auto i = rng.weighted_index(density_);
    return i < density_.size() ? static_cast<TownId>(i) : TownId{0};
}

void WorldGrid::occupy(HouseId id, HouseholdId household) {
    auto &house = houses_.at(std::size_t(id));
    if (house.occupant != kNoHousehold) {
        throw SimulationError("house " + std::to_string(id) + " already occupied");
    }
    house.occupant = household;
    auto &vac = towns_.at(std::size_t(house.town)).vacant;
    auto it = std::find(vac.begin(), vac.end(), id);
    if (it != vac.end()) {
        *it = vac.back();
        vac.pop_back();
    }
}

void WorldGrid::vacate(HouseId id) {
    auto &house = houses_.at(std::size_t(id));
    if (house.occupant == kNoHousehold) {
        return;
    }
    house.occupant = kNoHousehold;
    towns_.at(std::size_t(house.town)).vacant.push_back(id);
}

} // namespace caresim
