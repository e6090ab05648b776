#include "aggtreat/stats.hpp"

#include <map>

namespace aggtreat {

CellStats build_cell_stats(const Dataset& data, const SupportIndex& index) {
    std::map<SubVector, double> sums;
    for (const Record& r : data.records) sums[r.s] += r.y;

    CellStats stats;
    stats.grid = data.grid;
    stats.n = data.n();
    for (const auto& [level, cells] : index.levels) {
        CellStats::Level out;
        out.level = level;
        for (const SupportIndex::Cell& c : cells) {
            CellStats::Cell cell;
            cell.s = c.s;
            cell.count = c.count;
            cell.mean = sums.at(c.s) / static_cast<double>(c.count);
            out.count += c.count;
            out.cells.push_back(std::move(cell));
        }
        for (CellStats::Cell& cell : out.cells)
            cell.prob = Rational(cell.count, out.count);
        out.prob = Rational(out.count, stats.n);
        stats.levels.push_back(std::move(out));
    }
    for (CellStats::Level& l : stats.levels) {
        double total = 0.0;
        for (const CellStats::Cell& c : l.cells) total += to_double(c.prob) * c.mean;
        l.mean_outcome = total;
    }
    return stats;
}

}  // namespace aggtreat
