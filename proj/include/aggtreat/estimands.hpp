#pragma once

#include "aggtreat/congruence.hpp"
#include "aggtreat/errors.hpp"
#include "aggtreat/grid.hpp"
#include "aggtreat/rational.hpp"
#include "aggtreat/stats.hpp"
#include "aggtreat/transport.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aggtreat {

enum class EstimandKind {
    matt,
    satt,
    att,
    aatt,
    scaled_aatt,
    delta,
    amatt_plus,
    amatt_tilde,
    overall_delta,
    overall_amatt_plus,
    overall_aatt,
    overall_scaled_aatt,
    alpha1,
};

std::string to_string(EstimandKind kind);
EstimandKind estimand_kind_from_string(const std::string& name);
bool is_overall(EstimandKind kind);

/// Identifies one estimand: a pair, a single vector, a level, or nothing.
struct EstimandRequest {
    EstimandKind kind = EstimandKind::delta;
    std::optional<SubVector> hi;
    std::optional<SubVector> lo;
    std::optional<int> level;  // grid units

    std::string label() const;
};

template <class Scalar>
struct EstimandT {
    EstimandRequest request;
    bool defined = false;
    Scalar value{};
    std::int64_t n_used = 0;
    bool congruent = false;     // meaningful for pair kinds
    Rational dropped_mass = 0;  // overall kinds: treated mass on undefined levels
    std::string note;           // reason when undefined
};

using Estimand = EstimandT<double>;

/// P(S(d)=hi, S(d-1)=lo | D in {d, d-1}) per level d, from latent types.
struct LatentJoint {
    std::map<int, std::map<std::pair<SubVector, SubVector>, Rational>> by_level;
};

namespace detail {

template <class Scalar>
EstimandT<Scalar> undefined_result(EstimandRequest request, std::string note) {
    EstimandT<Scalar> out;
    out.request = std::move(request);
    out.note = std::move(note);
    return out;
}

}  // namespace detail

template <class Scalar>
EstimandT<Scalar> matt(const Stats<Scalar>& stats, const SubVector& hi, const SubVector& lo) {
    if (hi.level() != lo.level() + 1)
        throw ValidationError("marginal effects compare adjacent aggregate levels; got " +
                              hi.str() + " vs " + lo.str());
    EstimandRequest request{EstimandKind::matt, hi, lo, hi.level()};
    const auto* hi_cell = stats.find_cell(hi);
    if (!hi_cell) return detail::undefined_result<Scalar>(request, "missing cell " + hi.str());
    const auto* lo_cell = stats.find_cell(lo);
    if (!lo_cell) return detail::undefined_result<Scalar>(request, "missing cell " + lo.str());
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = hi_cell->mean - lo_cell->mean;
    out.n_used = hi_cell->count + lo_cell->count;
    out.congruent = is_congruent(hi, lo);
    return out;
}

template <class Scalar>
EstimandT<Scalar> satt(const Stats<Scalar>& stats, const SubVector& s, const SubVector& s2) {
    if (s.level() != s2.level() || l1_distance(s, s2) != 2)
        throw ValidationError("substitution effects compare unit-exchange pairs; got " + s.str() +
                              " vs " + s2.str());
    EstimandRequest request{EstimandKind::satt, s, s2, s.level()};
    const auto* a = stats.find_cell(s);
    if (!a) return detail::undefined_result<Scalar>(request, "missing cell " + s.str());
    const auto* b = stats.find_cell(s2);
    if (!b) return detail::undefined_result<Scalar>(request, "missing cell " + s2.str());
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = a->mean - b->mean;
    out.n_used = a->count + b->count;
    return out;
}

template <class Scalar>
EstimandT<Scalar> att(const Stats<Scalar>& stats, const SubVector& s) {
    EstimandRequest request{EstimandKind::att, s, std::nullopt, s.level()};
    SubVector baseline(std::vector<int>(static_cast<std::size_t>(stats.grid.k), 0));
    const auto* zero = stats.find_cell(baseline);
    if (!zero) return detail::undefined_result<Scalar>(request, "baseline missing");
    const auto* cell = stats.find_cell(s);
    if (!cell) return detail::undefined_result<Scalar>(request, "missing cell " + s.str());
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = cell->mean - zero->mean;
    out.n_used = cell->count + zero->count;
    return out;
}

template <class Scalar>
EstimandT<Scalar> aatt(const Stats<Scalar>& stats, int level) {
    EstimandRequest request{EstimandKind::aatt, std::nullopt, std::nullopt, level};
    const auto* zero = stats.find_level(0);
    if (!zero) return detail::undefined_result<Scalar>(request, "baseline missing");
    const auto* at = stats.find_level(level);
    if (!at) return detail::undefined_result<Scalar>(request, "level not observed");
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = at->mean_outcome - zero->mean_outcome;
    out.n_used = at->count + zero->count;
    return out;
}

template <class Scalar>
EstimandT<Scalar> scaled_aatt(const Stats<Scalar>& stats, int level) {
    EstimandT<Scalar> out = aatt(stats, level);
    out.request.kind = EstimandKind::scaled_aatt;
    if (!out.defined) return out;
    if (level <= 0) throw ValidationError("scaled effects need a positive level");
    Rational scale = Rational(level) * rational_of(stats.grid.resolution);
    out.value = out.value / scalar_from_rational<Scalar>(scale);
    return out;
}

template <class Scalar>
EstimandT<Scalar> delta(const Stats<Scalar>& stats, int level) {
    EstimandRequest request{EstimandKind::delta, std::nullopt, std::nullopt, level};
    const auto* hi = stats.find_level(level);
    const auto* lo = stats.find_level(level - 1);
    if (!hi || !lo)
        return detail::undefined_result<Scalar>(request, "adjacent level not observed");
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = hi->mean_outcome - lo->mean_outcome;
    out.n_used = hi->count + lo->count;
    return out;
}

/// Normalized product weights over the congruent pairs at one level.
template <class Scalar>
EstimandT<Scalar> amatt_plus(const Stats<Scalar>& stats, int level) {
    EstimandRequest request{EstimandKind::amatt_plus, std::nullopt, std::nullopt, level};
    const auto* hi = stats.find_level(level);
    const auto* lo = stats.find_level(level - 1);
    if (!hi || !lo)
        return detail::undefined_result<Scalar>(request, "adjacent level not observed");
    Rational denominator = 0;
    Scalar weighted{};
    for (const auto& hc : hi->cells) {
        for (const auto& lc : lo->cells) {
            if (!is_congruent(hc.s, lc.s)) continue;
            Rational mass = hc.prob * lc.prob;
            denominator += mass;
            weighted += scalar_from_rational<Scalar>(mass) * (hc.mean - lc.mean);
        }
    }
    if (denominator == 0)
        return detail::undefined_result<Scalar>(request, "no congruent pair carries mass");
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = weighted / scalar_from_rational<Scalar>(denominator);
    out.n_used = hi->count + lo->count;
    return out;
}

/// Weights from a latent-type joint distribution, renormalized over congruent
/// pairs. With `joint` built as the product of the observed marginals this
/// reproduces amatt_plus.
template <class Scalar>
EstimandT<Scalar> amatt_tilde(const Stats<Scalar>& stats, const LatentJoint& joint, int level) {
    EstimandRequest request{EstimandKind::amatt_tilde, std::nullopt, std::nullopt, level};
    auto it = joint.by_level.find(level);
    if (it == joint.by_level.end())
        return detail::undefined_result<Scalar>(request, "no latent joint at this level");
    Rational congruent_mass = 0;
    Scalar weighted{};
    for (const auto& [pair, mass] : it->second) {
        if (mass == 0 || !is_congruent(pair.first, pair.second)) continue;
        auto hi = stats.cell_mean(pair.first);
        auto lo = stats.cell_mean(pair.second);
        if (!hi || !lo)
            return detail::undefined_result<Scalar>(
                request, "missing cell " + (hi ? pair.second.str() : pair.first.str()));
        congruent_mass += mass;
        weighted += scalar_from_rational<Scalar>(mass) * (*hi - *lo);
    }
    if (congruent_mass == 0)
        return detail::undefined_result<Scalar>(request, "no congruent latent mass");
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = weighted / scalar_from_rational<Scalar>(congruent_mass);
    return out;
}

/// The product-of-marginals joint for one level (the independence special case).
template <class Scalar>
LatentJoint product_joint(const Stats<Scalar>& stats, int level) {
    LatentJoint joint;
    const auto* hi = stats.find_level(level);
    const auto* lo = stats.find_level(level - 1);
    if (!hi || !lo) return joint;
    auto& cells = joint.by_level[level];
    for (const auto& hc : hi->cells)
        for (const auto& lc : lo->cells) cells[{hc.s, lc.s}] = hc.prob * lc.prob;
    return joint;
}

/// Average of a per-level estimand over P(D=d | D>0), dropping undefined
/// levels and renormalizing; the dropped treated mass is disclosed.
template <class Scalar>
EstimandT<Scalar> overall(const Stats<Scalar>& stats, EstimandKind per_level_kind) {
    EstimandKind overall_kind;
    switch (per_level_kind) {
        case EstimandKind::delta: overall_kind = EstimandKind::overall_delta; break;
        case EstimandKind::amatt_plus: overall_kind = EstimandKind::overall_amatt_plus; break;
        case EstimandKind::aatt: overall_kind = EstimandKind::overall_aatt; break;
        case EstimandKind::scaled_aatt: overall_kind = EstimandKind::overall_scaled_aatt; break;
        default: throw ValidationError("no overall average for " + to_string(per_level_kind));
    }
    EstimandRequest request{overall_kind, std::nullopt, std::nullopt, std::nullopt};
    Rational treated_mass = 0;
    for (const auto& l : stats.levels)
        if (l.level > 0) treated_mass += l.prob;
    if (treated_mass == 0)
        return detail::undefined_result<Scalar>(request, "no treated mass");

    Rational used_mass = 0;
    Rational dropped = 0;
    Scalar weighted{};
    std::int64_t n_used = 0;
    for (const auto& l : stats.levels) {
        if (l.level <= 0) continue;
        EstimandT<Scalar> component;
        switch (per_level_kind) {
            case EstimandKind::delta: component = delta(stats, l.level); break;
            case EstimandKind::amatt_plus: component = amatt_plus(stats, l.level); break;
            case EstimandKind::aatt: component = aatt(stats, l.level); break;
            default: component = scaled_aatt(stats, l.level); break;
        }
        if (!component.defined) {
            dropped += l.prob;
            continue;
        }
        used_mass += l.prob;
        weighted += scalar_from_rational<Scalar>(l.prob) * component.value;
        n_used += l.count;
    }
    if (used_mass == 0)
        return detail::undefined_result<Scalar>(request, "undefined at every treated level");
    EstimandT<Scalar> out;
    out.request = request;
    out.defined = true;
    out.value = weighted / scalar_from_rational<Scalar>(used_mass);
    out.dropped_mass = dropped / treated_mass;
    out.n_used = n_used;
    return out;
}

/// Slope of the outcome on the aggregated treatment in original units, with
/// its two weighting-scheme representations over the level grid.
template <class Scalar>
struct RegressionDecompositionT {
    struct LevelTerm {
        int level = 0;                          // grid units
        Rational omega_marginal;                // weight on E[Y|d] - E[Y|d-1]
        Rational omega_baseline;                // weight on (E[Y|d] - E[Y|0]) / d
        std::optional<Scalar> delta_step;       // per grid step
        std::optional<Scalar> baseline_per_unit;  // per original unit
    };

    Scalar alpha1{};       // original units
    Scalar alpha1_step{};  // per grid step: alpha1 * resolution
    Rational mean_level;   // E[D] in grid units
    Rational var_level;    // Var(D) in grid units squared
    std::vector<LevelTerm> terms;
    bool marginal_route_defined = false;   // all interior levels observed
    bool baseline_route_defined = false;   // untreated level observed
    std::optional<Scalar> marginal_reconstruction;   // original units
    std::optional<Scalar> baseline_reconstruction;   // original units
};

using RegressionDecomposition = RegressionDecompositionT<double>;

template <class Scalar>
RegressionDecompositionT<Scalar> regression(const Stats<Scalar>& stats) {
    if (stats.levels.empty()) throw ValidationError("no data");
    RegressionDecompositionT<Scalar> out;
    Rational mu = 0;
    for (const auto& l : stats.levels) mu += Rational(l.level) * l.prob;
    Rational var = 0;
    for (const auto& l : stats.levels) {
        Rational centred = Rational(l.level) - mu;
        var += centred * centred * l.prob;
    }
    if (var == 0) throw ComputationError("degenerate variance: the aggregated treatment is constant");
    out.mean_level = mu;
    out.var_level = var;

    Scalar alpha_step{};
    for (const auto& l : stats.levels)
        alpha_step +=
            scalar_from_rational<Scalar>((Rational(l.level) - mu) * l.prob / var) * l.mean_outcome;
    out.alpha1_step = alpha_step;
    Rational res = rational_of(stats.grid.resolution);
    out.alpha1 = alpha_step / scalar_from_rational<Scalar>(res);

    int lo_level = stats.levels.front().level;
    int hi_level = stats.levels.back().level;
    bool consecutive = static_cast<int>(stats.levels.size()) == hi_level - lo_level + 1;
    const auto* zero = stats.find_level(0);

    // tail sums T(g) = sum_{j >= g} (j - mu) P(j)
    auto tail_at = [&](int g) {
        Rational acc = 0;
        for (const auto& l : stats.levels)
            if (l.level >= g) acc += (Rational(l.level) - mu) * l.prob;
        return acc;
    };

    for (int g = lo_level + 1; g <= hi_level; ++g) {
        typename RegressionDecompositionT<Scalar>::LevelTerm term;
        term.level = g;
        term.omega_marginal = tail_at(g) / var;
        const auto* at = stats.find_level(g);
        term.omega_baseline = at ? Rational(g) * (Rational(g) - mu) * at->prob / var : Rational(0);
        const auto* prev = stats.find_level(g - 1);
        if (at && prev) term.delta_step = at->mean_outcome - prev->mean_outcome;
        if (at && zero && g > 0)
            term.baseline_per_unit = (at->mean_outcome - zero->mean_outcome) /
                                     scalar_from_rational<Scalar>(Rational(g) * res);
        out.terms.push_back(std::move(term));
    }

    out.marginal_route_defined = consecutive;
    if (consecutive) {
        Scalar acc{};
        for (const auto& term : out.terms)
            acc += scalar_from_rational<Scalar>(term.omega_marginal) * *term.delta_step;
        out.marginal_reconstruction = acc / scalar_from_rational<Scalar>(res);
    }
    out.baseline_route_defined = zero != nullptr && hi_level > 0;
    if (out.baseline_route_defined) {
        Scalar acc{};
        for (const auto& term : out.terms) {
            if (term.omega_baseline == 0) continue;
            acc += scalar_from_rational<Scalar>(term.omega_baseline) * *term.baseline_per_unit;
        }
        out.baseline_reconstruction = acc;
    }
    return out;
}

template <class Scalar>
EstimandT<Scalar> alpha1(const Stats<Scalar>& stats) {
    EstimandT<Scalar> out;
    out.request.kind = EstimandKind::alpha1;
    out.defined = true;
    out.value = regression(stats).alpha1;
    out.n_used = stats.n;
    return out;
}

/// Evaluate one request against a statistics table.
template <class Scalar>
EstimandT<Scalar> evaluate_estimand(const Stats<Scalar>& stats, const EstimandRequest& request,
                                    const LatentJoint* joint = nullptr) {
    switch (request.kind) {
        case EstimandKind::matt: return matt(stats, *request.hi, *request.lo);
        case EstimandKind::satt: return satt(stats, *request.hi, *request.lo);
        case EstimandKind::att: return att(stats, *request.hi);
        case EstimandKind::aatt: return aatt(stats, *request.level);
        case EstimandKind::scaled_aatt: return scaled_aatt(stats, *request.level);
        case EstimandKind::delta: return delta(stats, *request.level);
        case EstimandKind::amatt_plus: return amatt_plus(stats, *request.level);
        case EstimandKind::amatt_tilde:
            if (!joint) throw ValidationError("amatt_tilde needs a latent joint distribution");
            return amatt_tilde(stats, *joint, *request.level);
        case EstimandKind::overall_delta: return overall(stats, EstimandKind::delta);
        case EstimandKind::overall_amatt_plus: return overall(stats, EstimandKind::amatt_plus);
        case EstimandKind::overall_aatt: return overall(stats, EstimandKind::aatt);
        case EstimandKind::overall_scaled_aatt: return overall(stats, EstimandKind::scaled_aatt);
        case EstimandKind::alpha1: return alpha1(stats);
    }
    throw ValidationError("unknown estimand kind");
}

/// The overall summary battery: the regression slope, the two marginal
/// averages, and the two untreated-baseline averages.
std::vector<EstimandRequest> summary_requests();

/// True when the estimand can be computed without sub-treatment data.
bool needs_subtreatment_data(EstimandKind kind);
/// True when the estimand mixes incongruent comparisons.
bool carries_incongruent_comparisons(EstimandKind kind);

}  // namespace aggtreat
