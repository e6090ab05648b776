#pragma once

#include "aggtreat/grid.hpp"
#include "aggtreat/rational.hpp"
#include "aggtreat/support.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aggtreat {

/// The coordinate k such that hi = lo + 1_k, if any. Requires adjacent levels.
std::optional<int> congruent_step(const SubVector& hi, const SubVector& lo);
inline bool is_congruent(const SubVector& hi, const SubVector& lo) {
    return congruent_step(hi, lo).has_value();
}

/// Ordered pair from adjacent aggregation sets.
struct MarginalPair {
    SubVector hi;  // level d
    SubVector lo;  // level d-1
    bool congruent = false;
    std::optional<int> step;  // defined iff congruent
};

/// All pairs between levels d and d-1, in lexicographic (hi, lo) order.
struct MarginalLevel {
    int level = 0;  // d, in grid units
    std::vector<MarginalPair> pairs;
    std::int64_t congruent_count = 0;
    std::int64_t incongruent_count = 0;

    std::int64_t total() const { return static_cast<std::int64_t>(pairs.size()); }
};

/// Full lattice {0..caps[0]} x ... x {0..caps[K-1]}.
struct LatticeSpec {
    std::vector<int> caps;
    std::int64_t cell_budget = 10'000'000;

    int k() const { return static_cast<int>(caps.size()); }
    static LatticeSpec uniform(int k, int cap);
};

/// All lattice points in lexicographic order. Throws ComputationError when the
/// lattice exceeds the cell budget.
std::vector<SubVector> enumerate_lattice(const LatticeSpec& spec);

std::vector<MarginalLevel> marginal_sets(const SupportIndex& index);
std::vector<MarginalLevel> marginal_sets(const LatticeSpec& spec);

/// Exact pair counts; arithmetic is arbitrary precision throughout.
struct CountReport {
    int k = 0;
    std::string kind;  // "binary", "trinary", "empirical"
    BigInt total = 0;
    BigInt congruent = 0;
    BigInt incongruent = 0;
    struct PerLevel {
        int level = 0;
        BigInt total = 0;
        BigInt congruent = 0;
    };
    std::vector<PerLevel> per_level;
};

BigInt binomial(int n, int k);

/// Closed forms: total C(2K, K-1), congruent K * 2^(K-1).
CountReport count_binary(int k);

/// Totals by the per-level product of lattice layer sizes; congruent part by
/// enumerating the {0,1,2}^K lattice.
CountReport count_trinary(int k);

/// Tally an enumerated marginal-set family (empirical or lattice).
CountReport count_marginals(const std::vector<MarginalLevel>& sets, int k,
                            const std::string& kind = "empirical");

struct FractionPoint {
    int k = 0;
    Rational congruent_fraction;
};

/// |M+| / |M| for K = 1..k_max. Kind is "binary" or "trinary".
std::vector<FractionPoint> congruent_fraction_series(int k_max, const std::string& kind);

}  // namespace aggtreat
