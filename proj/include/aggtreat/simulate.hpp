#pragma once

#include "aggtreat/config.hpp"
#include "aggtreat/dataset.hpp"
#include "aggtreat/estimands.hpp"
#include "aggtreat/grid.hpp"
#include "aggtreat/rational.hpp"
#include "aggtreat/stats.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace aggtreat {

/// One latent type: the sub-treatment vector realized at every positive
/// aggregate level. Level 0 is always the zero vector.
struct LatentPath {
    std::vector<SubVector> at_level;  // index d-1 holds the vector for level d

    const SubVector& at(int level) const { return at_level[static_cast<std::size_t>(level - 1)]; }
};

struct LatentTypeSpec {
    std::vector<LatentPath> paths;
    std::vector<Rational> masses;
    bool congruent_only = false;

    int count() const { return static_cast<int>(paths.size()); }
    int max_level() const {
        return paths.empty() ? 0 : static_cast<int>(paths.front().at_level.size());
    }
};

enum class SortingMode { independent, table };

struct SortingSpec {
    SortingMode mode = SortingMode::independent;
    std::vector<Rational> d_marginal;              // P(D = 0..N), independent mode
    std::vector<std::vector<Rational>> d_by_type;  // per-type rows, table mode

    const std::vector<Rational>& row(int type) const {
        return mode == SortingMode::independent ? d_marginal
                                                : d_by_type[static_cast<std::size_t>(type)];
    }
};

enum class OutcomeMode { free, homogeneous, linear };

/// Potential-outcome surface plus optional per-type level shifts. A nonzero
/// shift correlates outcomes with types and so injects selection.
struct OutcomeModel {
    OutcomeMode mode = OutcomeMode::free;
    Rational baseline = 0;                  // E[Y(0)]
    std::map<SubVector, Rational> values;   // free mode: E[Y(s)] per vector
    std::vector<Rational> betas;            // homogeneous: increment at each level
    Rational theta = 0;                     // linear: slope per original unit
    double noise_sd = 0.0;
    std::vector<Rational> type_offsets;     // empty means no selection

    /// E[Y(s)] before any type offset.
    Rational base_value(const SubVector& s, double resolution) const;
};

struct ScenarioSpec {
    GridSpec grid;
    LatentTypeSpec types;
    SortingSpec sorting;
    OutcomeModel outcome;

    void validate() const;
    static ScenarioSpec from_file(const std::string& path);
    static ScenarioSpec from_kv(const KeyValueFile& kv);
};

/// Exact population implied by a scenario: conditional cell means and
/// frequencies, the latent joint, selection-bias terms, and the true causal
/// quantities from the potential-outcome surface.
class LatentPopulation {
public:
    explicit LatentPopulation(ScenarioSpec spec);

    const ScenarioSpec& spec() const { return spec_; }

    /// P(D = d), zero-mass levels omitted.
    const std::vector<Rational>& level_masses() const { return level_mass_; }

    /// Observable cell means and frequencies, exact.
    const PopulationStats& stats() const { return stats_; }

    /// P(S(d)=hi, S(d-1)=lo | D in {d, d-1}) for every feasible d.
    const LatentJoint& latent_joint() const { return joint_; }

    /// E[Y(s)] surface (no selection offsets).
    Rational potential_outcome(const SubVector& s) const;

    Rational true_att(const SubVector& s) const;
    Rational true_matt(const SubVector& hi, const SubVector& lo) const;

    /// E[offset | S = s] - E[offset | S = 0]: the bias the untreated-baseline
    /// route picks up under selection.
    Rational untreated_bias(const SubVector& s) const;

    /// Caps covering every realized coordinate (for lattice enumeration).
    std::vector<int> lattice_caps() const;

private:
    ScenarioSpec spec_;
    std::vector<Rational> level_mass_;                 // indexed by level
    PopulationStats stats_;
    LatentJoint joint_;
    std::map<SubVector, Rational> offset_by_cell_;     // E[offset | S = s]
};

LatentPopulation make_population(ScenarioSpec spec);

/// Draw n units: type and level per the sorting spec, outcome from the
/// potential-outcome surface plus Gaussian noise.
Dataset generate(const ScenarioSpec& spec, int n, std::uint64_t seed);

/// One identity check at the population level; exact arithmetic throughout.
struct OracleCheck {
    std::string name;
    std::string detail;
    Rational residual;
    bool pass = false;
};

struct OracleReport {
    std::vector<OracleCheck> checks;
    bool all_pass = true;

    void add(std::string name, std::string detail, Rational residual);
};

/// Verify the decomposition identities, the two-route reconstructions, and the
/// weighting-scheme contracts against the population ground truth.
OracleReport oracle_check(const LatentPopulation& population);

}  // namespace aggtreat
