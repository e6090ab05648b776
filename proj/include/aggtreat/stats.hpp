#pragma once

#include "aggtreat/dataset.hpp"
#include "aggtreat/errors.hpp"
#include "aggtreat/grid.hpp"
#include "aggtreat/rational.hpp"
#include "aggtreat/support.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace aggtreat {

template <class Scalar>
Scalar scalar_from_rational(const Rational& r);

template <>
inline double scalar_from_rational<double>(const Rational& r) { return to_double(r); }

template <>
inline Rational scalar_from_rational<Rational>(const Rational& r) { return r; }

/// Conditional cell statistics keyed by sub-treatment vector and aggregate level.
/// Frequencies are exact rationals in both the empirical case (count/n) and the
/// population case; cell means are doubles for samples and rationals for
/// population ground truth. Cells that are not observed are absent.
template <class Scalar>
struct Stats {
    struct Cell {
        SubVector s;
        Scalar mean{};           // E[Y | S = s]
        Rational prob;           // P(S = s | D = level)
        std::int64_t count = 0;  // 0 for population-level tables
    };
    struct Level {
        int level = 0;           // aggregate level in grid units
        Rational prob;           // P(D = level)
        Scalar mean_outcome{};   // E[Y | D = level], accumulated from cells
        std::int64_t count = 0;
        std::vector<Cell> cells; // lexicographic by vector
    };

    GridSpec grid;
    std::vector<Level> levels;   // ascending by level
    std::int64_t n = 0;

    const Level* find_level(int level) const {
        for (const Level& l : levels)
            if (l.level == level) return &l;
        return nullptr;
    }

    const Level& at(int level) const {
        const Level* l = find_level(level);
        if (!l) throw ValidationError("no cells at aggregate level " + std::to_string(level));
        return *l;
    }

    const Cell* find_cell(const SubVector& s) const {
        const Level* l = find_level(s.level());
        if (!l) return nullptr;
        for (const Cell& c : l->cells)
            if (c.s == s) return &c;
        return nullptr;
    }

    std::optional<Scalar> cell_mean(const SubVector& s) const {
        const Cell* c = find_cell(s);
        if (!c) return std::nullopt;
        return c->mean;
    }

    std::vector<int> observed_levels() const {
        std::vector<int> out;
        for (const Level& l : levels) out.push_back(l.level);
        return out;
    }

    int max_level() const { return levels.empty() ? -1 : levels.back().level; }

    /// E[S_k | D = level] in grid units; exact regardless of the Scalar type.
    Rational mean_subtreatment(int level, int k) const {
        const Level& l = at(level);
        Rational total = 0;
        for (const Cell& c : l.cells) total += c.prob * c.s[k];
        return total;
    }

    /// Recompute E[Y | D = level] from the cells.
    Scalar level_mean_from_cells(int level) const {
        const Level& l = at(level);
        Scalar total{};
        for (const Cell& c : l.cells) total += scalar_from_rational<Scalar>(c.prob) * c.mean;
        return total;
    }
};

using CellStats = Stats<double>;
using PopulationStats = Stats<Rational>;

/// Conditional means and frequencies from a dataset. Frequencies are exact
/// rationals; means are double sample means.
CellStats build_cell_stats(const Dataset& data, const SupportIndex& index);
inline CellStats build_cell_stats(const Dataset& data) {
    return build_cell_stats(data, build_support(data));
}

}  // namespace aggtreat
