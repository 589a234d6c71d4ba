#pragma once

#include "caresim/config.h"
#include "caresim/rng.h"
#include "caresim/types.h"

#include <optional>
#include <vector>

namespace caresim {

struct House {
    TownId town = kNoTown;
    int bedrooms = 1;
    HouseholdId occupant = kNoHousehold;
};

struct Town {
    int row = 0;
    int col = 0;
    double density_weight = 0.0;
    std::vector<HouseId> houses;
    std::vector<HouseId> vacant;  // unordered pool of unoccupied houses
};

/// The fixed grid of towns and their houses.
class WorldGrid {
public:
    WorldGrid() = default;

    /// Distributes config.total_houses over towns in proportion to density
    /// weight, capped at kMaxHousesPerTown per town.
    static WorldGrid build(const ScenarioConfig &config, Rng &rng);

    int town_count() const noexcept { return static_cast<int>(towns_.size()); }
    const Town &town(TownId id) const { return towns_.at(static_cast<std::size_t>(id)); }
    const House &house(HouseId id) const { return houses_.at(static_cast<std::size_t>(id)); }
    const std::vector<House> &houses() const noexcept { return houses_; }

    /// Manhattan distance between town cells.
    int grid_distance(TownId a, TownId b) const;

    double vacancy_share(TownId town) const;
    bool has_vacancy(TownId town) const { return !towns_.at(std::size_t(town)).vacant.empty(); }

    /// Random vacant house in the town, or nullopt when full.
    std::optional<HouseId> random_vacant_house(TownId town, Rng &rng) const;

    /// Nearest town (by grid distance, ties to lowest id) with a vacancy.
    std::optional<TownId> nearest_town_with_vacancy(TownId from) const;

    /// Town drawn with probability proportional to density weight.
    TownId random_town_by_density(Rng &rng) const;

    void occupy(HouseId house, HouseholdId household);
    void vacate(HouseId house);

    /// Test helper: a custom grid with given houses per town.
    static WorldGrid from_towns(std::vector<Town> towns, std::vector<House> houses);

private:
    std::vector<Town> towns_;
    std::vector<House> houses_;
    std::vector<double> density_;
};

} // namespace caresim
