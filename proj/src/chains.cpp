#include "aggtreat/chains.hpp"

#include "aggtreat/errors.hpp"

namespace aggtreat {

Chain build_chain(const SubVector& from, const SubVector& to) {
    if (from.k() != to.k()) throw ValidationError("chain endpoints differ in length");
    if (from.level() != to.level())
        throw ValidationError("chain endpoints must share an aggregate level");
    Chain chain;
    chain.level = from.level();
    chain.vectors.push_back(from);
    SubVector current = from;
    while (current != to) {
        int lose = -1, gain = -1;
        for (int i = 0; i < current.k(); ++i) {
            if (lose < 0 && current[i] > to[i]) lose = i;
            if (gain < 0 && current[i] < to[i]) gain = i;
        }
        ++current.units[static_cast<std::size_t>(gain)];
        --current.units[static_cast<std::size_t>(lose)];
        chain.steps.push_back({gain, lose});
        chain.vectors.push_back(current);
    }
    return chain;
}

SubVector congruent_parent_lattice(const SubVector& lo, const std::vector<int>* caps) {
    for (int k = 0; k < lo.k(); ++k) {
        if (caps && lo[k] >= (*caps)[static_cast<std::size_t>(k)]) continue;
        SubVector parent = lo;
        ++parent.units[static_cast<std::size_t>(k)];
        return parent;
    }
    throw ValidationError("every coordinate of " + lo.str() + " is at its cap");
}

std::optional<SubVector> congruent_parent_in(const SubVector& lo,
                                             const std::vector<SubVector>& candidates) {
    for (const SubVector& candidate : candidates)
        if (is_congruent(candidate, lo)) return candidate;  // candidates are lex-sorted
    return std::nullopt;
}

int Decomposition::negative_terms() const {
    int n = 0;
    for (const DecompositionTerm& t : terms) n += t.sign < 0;
    return n;
}

int Decomposition::positive_terms() const {
    return static_cast<int>(terms.size()) - negative_terms();
}

namespace {

bool observed(const SupportIndex* support, const SubVector& s) {
    if (!support) return true;
    if (!support->has_level(s.level())) return false;
    for (const SupportIndex::Cell& cell : support->at(s.level()))
        if (cell.s == s) return true;
    return false;
}

/// Unique vector one level up congruent with both ends of a unit exchange:
/// for next = prev + 1_j - 1_l it is prev + 1_j.
SubVector common_parent(const SubVector& prev, const SubVector& next) {
    for (int i = 0; i < prev.k(); ++i) {
        if (next[i] - prev[i] == 1) {
            SubVector parent = prev;
            ++parent.units[static_cast<std::size_t>(i)];
            return parent;
        }
    }
    throw ValidationError("chain link is not a unit exchange");
}

/// Congruent vector one level below hi, decrementing the last positive
/// coordinate (the lexicographically largest congruent neighbour).
SubVector canonical_bridge(const SubVector& hi) {
    for (int k = hi.k() - 1; k >= 0; --k) {
        if (hi[k] >= 1) {
            SubVector bridge = hi;
            --bridge.units[static_cast<std::size_t>(k)];
            return bridge;
        }
    }
    throw ValidationError("no congruent neighbour below " + hi.str());
}

void validate_chain(const Chain& chain, const SubVector& from, const SubVector& to) {
    if (chain.vectors.empty() || chain.vectors.front() != from || chain.vectors.back() != to)
        throw ValidationError("supplied chain does not connect the bridge to the lower vector");
    for (std::size_t b = 0; b + 1 < chain.vectors.size(); ++b) {
        const SubVector& prev = chain.vectors[b];
        const SubVector& next = chain.vectors[b + 1];
        if (prev.level() != next.level() || l1_distance(prev, next) != 2)
            throw ValidationError("chain link " + std::to_string(b) + " is not a unit exchange");
    }
}

}  // namespace

DecomposeResult decompose_satt(const SubVector& lo, const SubVector& lo_prime,
                               const SupportIndex* support) {
    DecomposeResult result;
    Decomposition decomposition;
    decomposition.target_hi = lo;
    decomposition.target_lo = lo_prime;
    if (lo == lo_prime) {
        result.decomposition = std::move(decomposition);
        return result;
    }
    if (lo.level() != lo_prime.level() || l1_distance(lo, lo_prime) != 2)
        throw ValidationError("substitution pairs must be one unit exchange apart");

    // lo = lo_prime + 1_j - 1_l; the shared parent is lo_prime + 1_j = lo + 1_l.
    SubVector parent = common_parent(lo_prime, lo);
    if (!observed(support, parent)) {
        result.missing = parent;
        return result;
    }
    decomposition.terms.push_back({TermKind::matt_plus, parent, lo_prime, +1});
    decomposition.terms.push_back({TermKind::matt_plus, parent, lo, -1});
    result.decomposition = std::move(decomposition);
    return result;
}

DecomposeResult decompose_incongruent(const MarginalPair& pair, DecomposeMode mode,
                                      const SupportIndex* support,
                                      const Chain* chain_override) {
    if (pair.congruent) throw ValidationError("pair is congruent; nothing to decompose");
    DecomposeResult result;

    // Bridge one level down that is congruent with the upper vector.
    SubVector bridge;
    if (support) {
        std::optional<SubVector> found;
        if (support->has_level(pair.lo.level())) {
            std::vector<SubVector> candidates = support->vectors_at(pair.lo.level());
            for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
                if (is_congruent(pair.hi, *it)) {
                    found = *it;
                    break;
                }
            }
        }
        if (!found) {
            result.missing = canonical_bridge(pair.hi);
            return result;
        }
        bridge = *found;
    } else {
        bridge = canonical_bridge(pair.hi);
    }

    Chain chain = chain_override ? *chain_override : build_chain(bridge, pair.lo);
    if (chain_override) validate_chain(chain, bridge, pair.lo);

    Decomposition decomposition;
    decomposition.target_hi = pair.hi;
    decomposition.target_lo = pair.lo;
    decomposition.terms.push_back({TermKind::matt_plus, pair.hi, bridge, +1});

    for (std::size_t b = 0; b + 1 < chain.vectors.size(); ++b) {
        const SubVector& prev = chain.vectors[b];
        const SubVector& next = chain.vectors[b + 1];
        if (support && next != pair.lo && !observed(support, next)) {
            result.missing = next;
            return result;
        }
        if (mode == DecomposeMode::satt_form) {
            decomposition.terms.push_back({TermKind::satt, prev, next, +1});
        } else {
            SubVector parent = common_parent(prev, next);
            if (!observed(support, parent)) {
                result.missing = parent;
                return result;
            }
            decomposition.terms.push_back({TermKind::matt_plus, parent, next, +1});
            decomposition.terms.push_back({TermKind::matt_plus, parent, prev, -1});
        }
    }
    result.decomposition = std::move(decomposition);
    return result;
}

}  // namespace aggtreat
