#pragma once

#include "aggtreat/congruence.hpp"
#include "aggtreat/grid.hpp"
#include "aggtreat/stats.hpp"
#include "aggtreat/support.hpp"

#include <optional>
#include <vector>

namespace aggtreat {

/// Sequence of same-level vectors linked by unit exchanges, each step strictly
/// closing the L1 distance to the terminal vector.
struct Chain {
    struct Step {
        int gain = 0;  // coordinate that receives one unit
        int lose = 0;  // coordinate that gives one unit
    };
    int level = 0;
    std::vector<SubVector> vectors;  // size length()+1
    std::vector<Step> steps;

    int length() const { return static_cast<int>(steps.size()); }
};

/// Canonical chain: each step moves one unit from the lowest-index surplus
/// coordinate to the lowest-index deficit coordinate.
Chain build_chain(const SubVector& from, const SubVector& to);

/// Smallest-coordinate congruent successor on a (possibly capped) lattice.
SubVector congruent_parent_lattice(const SubVector& lo, const std::vector<int>* caps = nullptr);

/// Lexicographically smallest congruent member of `candidates`, if any.
std::optional<SubVector> congruent_parent_in(const SubVector& lo,
                                             const std::vector<SubVector>& candidates);

enum class TermKind { matt_plus, satt };

struct DecompositionTerm {
    TermKind kind = TermKind::matt_plus;
    SubVector hi;
    SubVector lo;
    int sign = +1;
};

/// Signed expansion of a mean difference m(hi) - m(lo) into congruent
/// unit-increment and unit-exchange terms.
struct Decomposition {
    SubVector target_hi;
    SubVector target_lo;
    std::vector<DecompositionTerm> terms;

    int negative_terms() const;
    int positive_terms() const;
};

struct DecomposeResult {
    std::optional<Decomposition> decomposition;
    std::optional<SubVector> missing;  // bridge vector absent from the support

    bool ok() const { return decomposition.has_value(); }
};

enum class DecomposeMode { satt_form, matt_form };

/// SATT(lo, lo_prime) as a difference of two congruent terms through the
/// unique common parent. `support` (when given) restricts bridges to observed
/// cells; otherwise any nonnegative lattice vector may serve.
DecomposeResult decompose_satt(const SubVector& lo, const SubVector& lo_prime,
                               const SupportIndex* support = nullptr);

/// Expansion of an incongruent pair. satt_form keeps the chain's exchange
/// terms; matt_form expands each exchange through its common parent, giving
/// B negative and B+1 positive congruent terms for a chain of length B.
DecomposeResult decompose_incongruent(const MarginalPair& pair, DecomposeMode mode,
                                      const SupportIndex* support = nullptr,
                                      const Chain* chain_override = nullptr);

template <class Scalar>
struct DecompositionValue {
    std::optional<Scalar> value;
    std::optional<SubVector> missing;
};

/// Sum the signed term values against a cell-mean table.
template <class Scalar>
DecompositionValue<Scalar> evaluate(const Decomposition& decomposition,
                                    const Stats<Scalar>& stats) {
    DecompositionValue<Scalar> result;
    Scalar total{};
    for (const DecompositionTerm& term : decomposition.terms) {
        auto hi = stats.cell_mean(term.hi);
        if (!hi) {
            result.missing = term.hi;
            return result;
        }
        auto lo = stats.cell_mean(term.lo);
        if (!lo) {
            result.missing = term.lo;
            return result;
        }
        Scalar diff = *hi - *lo;
        total += term.sign > 0 ? diff : -diff;
    }
    result.value = total;
    return result;
}

}  // namespace aggtreat
