#pragma once

#include "aggtreat/dataset.hpp"
#include "aggtreat/grid.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace aggtreat {

/// Observed support, grouped by aggregate level and ordered lexicographically
/// within each level.
struct SupportIndex {
    struct Cell {
        SubVector s;
        std::int64_t count = 0;
    };

    GridSpec grid;
    std::map<int, std::vector<Cell>> levels;  // key: aggregate level in grid units
    std::int64_t n = 0;

    bool has_level(int level) const { return levels.count(level) > 0; }
    int max_level() const { return levels.empty() ? -1 : levels.rbegin()->first; }
    const std::vector<Cell>& at(int level) const;
    std::vector<SubVector> vectors_at(int level) const;

    /// Levels present in the index, ascending.
    std::vector<int> observed_levels() const;
};

SupportIndex build_support(const Dataset& data);

}  // namespace aggtreat
