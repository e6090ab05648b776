#pragma once

#include "aggtreat/congruence.hpp"
#include "aggtreat/errors.hpp"
#include "aggtreat/grid.hpp"
#include "aggtreat/rational.hpp"
#include "aggtreat/stats.hpp"

#include <string>
#include <vector>

namespace aggtreat {

/// Nonnegative weights over pairs of adjacent aggregation sets whose row sums
/// reproduce the upper-level marginal and whose column sums reproduce the
/// lower-level marginal.
struct WeightScheme {
    enum class Provenance { product, minimally_incongruent, user };

    int level = 0;                          // d, in grid units
    std::vector<SubVector> rows;            // level d, lexicographic
    std::vector<SubVector> cols;            // level d-1, lexicographic
    std::vector<std::vector<Rational>> w;   // rows x cols
    Provenance provenance = Provenance::user;

    Rational total() const;
    Rational row_sum(std::size_t i) const;
    Rational col_sum(std::size_t j) const;
    /// Mass on pairs that are not unit increments.
    Rational incongruent_mass() const;
};

std::string to_string(WeightScheme::Provenance p);

/// Balanced 0/1-cost transportation instance: unit cost on incongruent cells.
struct TransportProblem {
    int level = 0;
    std::vector<SubVector> rows;
    std::vector<SubVector> cols;
    std::vector<Rational> supplies;  // P(S = row | D = level), sums to 1
    std::vector<Rational> demands;   // P(S = col | D = level-1), sums to 1
    std::vector<std::vector<bool>> congruent;

    void validate() const;

    static TransportProblem from_marginals(int level, std::vector<SubVector> rows,
                                           std::vector<Rational> supplies,
                                           std::vector<SubVector> cols,
                                           std::vector<Rational> demands);
    /// Floating marginals are snapped to the 1e-9 grid before the exact solve.
    static TransportProblem from_double_marginals(int level, std::vector<SubVector> rows,
                                                  const std::vector<double>& supplies,
                                                  std::vector<SubVector> cols,
                                                  const std::vector<double>& demands);
};

template <class Scalar>
TransportProblem make_transport_problem(const Stats<Scalar>& stats, int level) {
    const auto* hi = stats.find_level(level);
    const auto* lo = stats.find_level(level - 1);
    if (!hi || !lo)
        throw ValidationError("transport problem at level " + std::to_string(level) +
                              " needs both adjacent levels observed");
    std::vector<SubVector> rows, cols;
    std::vector<Rational> supplies, demands;
    for (const auto& c : hi->cells) {
        rows.push_back(c.s);
        supplies.push_back(c.prob);
    }
    for (const auto& c : lo->cells) {
        cols.push_back(c.s);
        demands.push_back(c.prob);
    }
    return TransportProblem::from_marginals(level, std::move(rows), std::move(supplies),
                                            std::move(cols), std::move(demands));
}

/// Row marginal times column marginal on every cell.
template <class Scalar>
WeightScheme product_weights(const Stats<Scalar>& stats, int level) {
    TransportProblem problem = make_transport_problem(stats, level);
    WeightScheme scheme;
    scheme.level = level;
    scheme.rows = problem.rows;
    scheme.cols = problem.cols;
    scheme.provenance = WeightScheme::Provenance::product;
    scheme.w.assign(scheme.rows.size(), std::vector<Rational>(scheme.cols.size()));
    for (std::size_t i = 0; i < scheme.rows.size(); ++i)
        for (std::size_t j = 0; j < scheme.cols.size(); ++j)
            scheme.w[i][j] = problem.supplies[i] * problem.demands[j];
    return scheme;
}

struct MinIncongruentSolution {
    Rational minimal_share;  // unique optimum; the scheme is one of possibly many
    WeightScheme scheme;
};

/// Exact optimum of the 0/1-cost transportation problem. The congruent cells
/// are seeded greedily in lexicographic order and grown to a maximum congruent
/// flow with shortest augmenting paths; leftover mass is routed over the
/// remaining cells and the support is pruned to a spanning forest.
MinIncongruentSolution solve_min_incongruent(const TransportProblem& problem);

struct SchemeCheck {
    double max_residual = 0.0;
    double min_entry = 0.0;
    double total_error = 0.0;
    std::vector<double> row_residuals;
    std::vector<double> col_residuals;
    bool pass = false;  // max residual at or below 1e-9 and no negative entry
};

/// Residuals of the marginal constraints against the observed frequencies.
template <class Scalar>
SchemeCheck check_scheme(const WeightScheme& scheme, const Stats<Scalar>& stats) {
    TransportProblem problem = make_transport_problem(stats, scheme.level);
    if (problem.rows != scheme.rows || problem.cols != scheme.cols)
        throw ValidationError("weight scheme support does not match the cell statistics");
    SchemeCheck check;
    Rational min_entry = 0;
    for (std::size_t i = 0; i < scheme.rows.size(); ++i)
        for (std::size_t j = 0; j < scheme.cols.size(); ++j)
            if (scheme.w[i][j] < min_entry) min_entry = scheme.w[i][j];
    check.min_entry = to_double(min_entry);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < scheme.rows.size(); ++i) {
        double r = to_double(scheme.row_sum(i) - problem.supplies[i]);
        check.row_residuals.push_back(r);
        max_abs = std::max(max_abs, std::abs(r));
    }
    for (std::size_t j = 0; j < scheme.cols.size(); ++j) {
        double r = to_double(scheme.col_sum(j) - problem.demands[j]);
        check.col_residuals.push_back(r);
        max_abs = std::max(max_abs, std::abs(r));
    }
    check.max_residual = max_abs;
    check.total_error = std::abs(to_double(scheme.total() - Rational(1)));
    check.pass = max_abs <= 1e-9 && min_entry >= 0;
    return check;
}

/// Sum of w(hi, lo) * (m(hi) - m(lo)) over the scheme's support.
template <class Scalar>
Scalar weighted_matt_sum(const WeightScheme& scheme, const Stats<Scalar>& stats) {
    Scalar total{};
    for (std::size_t i = 0; i < scheme.rows.size(); ++i) {
        for (std::size_t j = 0; j < scheme.cols.size(); ++j) {
            if (scheme.w[i][j] == 0) continue;
            auto hi = stats.cell_mean(scheme.rows[i]);
            auto lo = stats.cell_mean(scheme.cols[j]);
            if (!hi || !lo)
                throw ValidationError("scheme references a cell without statistics");
            total += scalar_from_rational<Scalar>(scheme.w[i][j]) * (*hi - *lo);
        }
    }
    return total;
}

/// A level/coordinate where the conditional sub-treatment mean strictly falls.
struct DecreasingMeanFlag {
    int level = 0;      // d: mean fell from d-1 to d
    int coordinate = 0;
    Rational mean_hi;   // E[S_k | D = d], grid units
    Rational mean_lo;   // E[S_k | D = d-1]
};

struct SubTreatmentMeanPoint {
    int level = 0;
    int coordinate = 0;
    double mean = 0.0;  // original units
};

struct DecreasingMeansReport {
    std::vector<DecreasingMeanFlag> flags;
    std::vector<SubTreatmentMeanPoint> series;  // stacked profile data
};

template <class Scalar>
DecreasingMeansReport decreasing_means_diagnostic(const Stats<Scalar>& stats) {
    DecreasingMeansReport report;
    for (const auto& level : stats.levels)
        for (int k = 0; k < stats.grid.k; ++k)
            report.series.push_back(
                {level.level, k,
                 to_double(stats.mean_subtreatment(level.level, k)) * stats.grid.resolution});
    for (std::size_t a = 0; a + 1 < stats.levels.size(); ++a) {
        int lo_level = stats.levels[a].level;
        int hi_level = stats.levels[a + 1].level;
        if (hi_level != lo_level + 1) continue;
        for (int k = 0; k < stats.grid.k; ++k) {
            Rational hi = stats.mean_subtreatment(hi_level, k);
            Rational lo = stats.mean_subtreatment(lo_level, k);
            if (hi < lo) report.flags.push_back({hi_level, k, hi, lo});
        }
    }
    return report;
}

/// Per-level minimal incongruent shares plus the decreasing-means flags.
struct IncongruencyReport {
    struct LevelEntry {
        int level = 0;
        Rational minimal_share;
        WeightScheme scheme;
    };
    std::vector<LevelEntry> levels;
    DecreasingMeansReport means;
};

template <class Scalar>
IncongruencyReport incongruency_report(const Stats<Scalar>& stats) {
    IncongruencyReport report;
    for (std::size_t a = 0; a + 1 < stats.levels.size(); ++a) {
        if (stats.levels[a + 1].level != stats.levels[a].level + 1) continue;
        int level = stats.levels[a + 1].level;
        MinIncongruentSolution solution =
            solve_min_incongruent(make_transport_problem(stats, level));
        report.levels.push_back({level, solution.minimal_share, std::move(solution.scheme)});
    }
    report.means = decreasing_means_diagnostic(stats);
    return report;
}

}  // namespace aggtreat
