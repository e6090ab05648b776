#include "aggtreat/table1.hpp"

#include "aggtreat/rational.hpp"

#include <string>
#include <vector>

namespace aggtreat {

namespace {

struct FixtureCell {
    const char* vector;
    int prob_num;
    int prob_den;
    const char* mean;
};

struct FixtureLevel {
    int level;
    std::vector<FixtureCell> cells;
};

const std::vector<FixtureLevel>& fixture_rows() {
    static const std::vector<FixtureLevel> rows = {
        {0, {{"0,0,0,0", 1, 1, "0"}}},
        {1, {{"1,0,0,0", 1, 1, "-0.219"}}},
        {2,
         {{"1,0,0,1", 1, 15, "0.169"},
          {"1,0,1,0", 4, 15, "-0.446"},
          {"2,0,0,0", 10, 15, "-0.237"}}},
        {3,
         {{"0,0,0,3", 2, 16, "0.254"},
          {"0,0,3,0", 3, 16, "-0.001"},
          {"0,3,0,0", 1, 16, "-0.207"},
          {"1,0,0,2", 1, 16, "0.509"},
          {"1,0,2,0", 3, 16, "-0.446"},
          {"1,1,1,0", 1, 16, "0.306"},
          {"3,0,0,0", 5, 16, "-0.176"}}},
        {4,
         {{"0,0,0,4", 2, 10, "0.084"},
          {"0,0,4,0", 3, 10, "-0.023"},
          {"0,4,0,0", 1, 10, "-0.311"},
          {"1,0,3,0", 3, 10, "-0.142"},
          {"4,0,0,0", 1, 10, "-0.888"}}},
        {5,
         {{"0,0,0,5", 1, 5, "0.035"},
          {"1,0,0,4", 1, 5, "-0.333"},
          {"1,0,4,0", 1, 5, "-0.785"},
          {"1,1,0,3", 1, 5, "0.290"},
          {"2,0,3,0", 1, 5, "0.545"}}},
        {6, {{"3,0,0,3", 1, 3, "-0.457"}, {"5,0,1,0", 2, 3, "0.174"}}},
    };
    return rows;
}

}  // namespace

PopulationStats enrichment_fixture() {
    PopulationStats stats;
    stats.grid.resolution = 0.5;
    stats.grid.k = 4;
    stats.grid.names = {"lessons", "sports", "volunteering", "before_after_school"};

    const auto& rows = fixture_rows();
    Rational level_mass(1, static_cast<int>(rows.size()));
    for (const FixtureLevel& row : rows) {
        PopulationStats::Level level;
        level.level = row.level;
        level.prob = level_mass;
        for (const FixtureCell& cell : row.cells) {
            PopulationStats::Cell out;
            out.s = SubVector::parse(cell.vector);
            out.prob = Rational(cell.prob_num, cell.prob_den);
            out.mean = rational_from_decimal(cell.mean);
            level.cells.push_back(std::move(out));
        }
        level.mean_outcome = 0;
        for (const auto& cell : level.cells) level.mean_outcome += cell.prob * cell.mean;
        stats.levels.push_back(std::move(level));
    }
    return stats;
}

}  // namespace aggtreat
