#include "aggtreat/congruence.hpp"

#include "aggtreat/errors.hpp"

#include <algorithm>
#include <map>

namespace aggtreat {

std::optional<int> congruent_step(const SubVector& hi, const SubVector& lo) {
    if (hi.k() != lo.k()) throw ValidationError("sub-treatment vectors differ in length");
    if (hi.level() != lo.level() + 1)
        throw ValidationError("congruence is defined between adjacent aggregate levels (got " +
                              std::to_string(hi.level()) + " vs " + std::to_string(lo.level()) +
                              ")");
    std::optional<int> step;
    for (int i = 0; i < hi.k(); ++i) {
        int diff = hi[i] - lo[i];
        if (diff == 0) continue;
        if (diff != 1 || step) return std::nullopt;  // any decrease or a second increase
        step = i;
    }
    return step;
}

LatticeSpec LatticeSpec::uniform(int k, int cap) {
    LatticeSpec spec;
    spec.caps.assign(static_cast<std::size_t>(k), cap);
    return spec;
}

std::vector<SubVector> enumerate_lattice(const LatticeSpec& spec) {
    if (spec.k() < 1) throw ValidationError("lattice needs at least one coordinate");
    std::int64_t cells = 1;
    for (int cap : spec.caps) {
        if (cap < 0) throw ValidationError("lattice caps must be nonnegative");
        cells *= cap + 1;
        if (cells > spec.cell_budget)
            throw ComputationError("lattice enumeration exceeds the cell budget of " +
                                   std::to_string(spec.cell_budget) + " cells");
    }
    std::vector<SubVector> out;
    out.reserve(static_cast<std::size_t>(cells));
    SubVector v;
    v.units.assign(spec.caps.size(), 0);
    while (true) {
        out.push_back(v);
        int i = spec.k() - 1;
        while (i >= 0 && v.units[static_cast<std::size_t>(i)] == spec.caps[static_cast<std::size_t>(i)]) {
            v.units[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++v.units[static_cast<std::size_t>(i)];
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<MarginalLevel> pairs_between_levels(
    const std::map<int, std::vector<SubVector>>& by_level) {
    std::vector<MarginalLevel> out;
    for (auto it = by_level.begin(); it != by_level.end(); ++it) {
        auto lower = by_level.find(it->first - 1);
        if (lower == by_level.end()) continue;
        MarginalLevel set;
        set.level = it->first;
        for (const SubVector& hi : it->second) {
            for (const SubVector& lo : lower->second) {
                MarginalPair pair;
                pair.hi = hi;
                pair.lo = lo;
                pair.step = congruent_step(hi, lo);
                pair.congruent = pair.step.has_value();
                (pair.congruent ? set.congruent_count : set.incongruent_count)++;
                set.pairs.push_back(std::move(pair));
            }
        }
        out.push_back(std::move(set));
    }
    return out;
}

}  // namespace

std::vector<MarginalLevel> marginal_sets(const SupportIndex& index) {
    std::map<int, std::vector<SubVector>> by_level;
    for (const auto& [level, cells] : index.levels)
        by_level[level] = index.vectors_at(level);
    return pairs_between_levels(by_level);
}

std::vector<MarginalLevel> marginal_sets(const LatticeSpec& spec) {
    std::map<int, std::vector<SubVector>> by_level;
    for (const SubVector& v : enumerate_lattice(spec)) by_level[v.level()].push_back(v);
    return pairs_between_levels(by_level);
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (int i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

CountReport count_binary(int k) {
    if (k < 1) throw ValidationError("need at least one sub-treatment");
    CountReport report;
    report.k = k;
    report.kind = "binary";
    for (int d = 1; d <= k; ++d) {
        CountReport::PerLevel row;
        row.level = d;
        row.total = binomial(k, d) * binomial(k, d - 1);
        row.congruent = BigInt(k) * binomial(k - 1, d - 1);
        report.per_level.push_back(row);
        report.total += row.total;
        report.congruent += row.congruent;
    }
    report.incongruent = report.total - report.congruent;
    // closed forms for the same quantities
    BigInt closed_total = binomial(2 * k, k - 1);
    BigInt closed_congruent = BigInt(k) << (k - 1);
    if (report.total != closed_total || report.congruent != closed_congruent)
        throw ComputationError("binary count closed forms disagree with level sums");
    return report;
}

namespace {

// Layer sizes of {0,1,2}^K: number of vectors summing to d, indexing the
// number of coordinates equal to 2 by r.
BigInt trinary_layer_size(int k, int d) {
    BigInt size = 0;
    for (int r = 0; 2 * r <= d; ++r) size += binomial(k, r) * binomial(k - r, d - 2 * r);
    return size;
}

}  // namespace

CountReport count_trinary(int k) {
    if (k < 1) throw ValidationError("need at least one sub-treatment");
    CountReport report;
    report.k = k;
    report.kind = "trinary";
    std::vector<BigInt> congruent_per_level(static_cast<std::size_t>(2 * k + 1), 0);
    // Each vector contributes one congruent pair per positive coordinate.
    for (const SubVector& v : enumerate_lattice(LatticeSpec::uniform(k, 2))) {
        int level = v.level();
        if (level == 0) continue;
        int positive = 0;
        for (int u : v.units) positive += u > 0;
        congruent_per_level[static_cast<std::size_t>(level)] += positive;
    }
    for (int d = 1; d <= 2 * k; ++d) {
        CountReport::PerLevel row;
        row.level = d;
        row.total = trinary_layer_size(k, d) * trinary_layer_size(k, d - 1);
        row.congruent = congruent_per_level[static_cast<std::size_t>(d)];
        report.per_level.push_back(row);
        report.total += row.total;
        report.congruent += row.congruent;
    }
    report.incongruent = report.total - report.congruent;
    return report;
}

CountReport count_marginals(const std::vector<MarginalLevel>& sets, int k,
                            const std::string& kind) {
    CountReport report;
    report.k = k;
    report.kind = kind;
    for (const MarginalLevel& set : sets) {
        CountReport::PerLevel row;
        row.level = set.level;
        row.total = set.total();
        row.congruent = set.congruent_count;
        report.per_level.push_back(row);
        report.total += row.total;
        report.congruent += row.congruent;
    }
    report.incongruent = report.total - report.congruent;
    return report;
}

std::vector<FractionPoint> congruent_fraction_series(int k_max, const std::string& kind) {
    if (k_max < 1 || k_max > 20)
        throw ValidationError("fraction series supports K between 1 and 20");
    std::vector<FractionPoint> out;
    for (int k = 1; k <= k_max; ++k) {
        CountReport report = kind == "binary"   ? count_binary(k)
                             : kind == "trinary" ? count_trinary(k)
                                                 : throw ValidationError("unknown support kind: " + kind);
        FractionPoint point;
        point.k = k;
        point.congruent_fraction = Rational(report.congruent, report.total);
        out.push_back(point);
    }
    return out;
}

}  // namespace aggtreat
