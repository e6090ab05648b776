#pragma once

#include "aggtreat/dataset.hpp"
#include "aggtreat/estimands.hpp"
#include "aggtreat/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aggtreat {

struct BootstrapResult {
    EstimandRequest request;
    bool defined = false;   // the full-sample point estimate
    double point = 0.0;
    double se = 0.0;
    int replicates_used = 0;
    int replicates_undefined = 0;
    bool unreliable = false;  // undefined in at least half the replicates
    std::uint64_t seed = 0;
};

/// Unit resampling with replacement. Each replicate draws its generator from
/// the master seed, so results do not depend on evaluation order.
std::vector<BootstrapResult> bootstrap(const Dataset& data,
                                       const std::vector<EstimandRequest>& requests,
                                       int total_replicates, std::uint64_t seed,
                                       const LatentJoint* joint = nullptr);

struct SutvaPairTest {
    int level = 0;
    SubVector a;
    SubVector b;
    double mean_difference = 0.0;
    double statistic = 0.0;  // Welch
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool reject = false;
};

struct SutvaTestReport {
    double alpha = 0.05;
    std::string adjustment = "holm";
    std::vector<SutvaPairTest> pairs;     // all within-level pairs, by level then lex
    std::vector<SubVector> skipped_cells; // fewer than two observations
    bool any_rejection = false;
    std::string diagnostic;               // set when no pair was eligible
};

/// Within-level differences in means (Welch statistic, normal reference) with
/// a step-down family-wise adjustment across all pairs. When `finer` is given,
/// the cells of `data` are partitioned by the finer vectors and the same
/// procedure runs within each coarse cell.
SutvaTestReport sutva_d_test(const Dataset& data, double alpha,
                             const Dataset* finer = nullptr,
                             const std::string& adjustment = "holm");

/// Step-down adjusted p-values (monotone, never below the raw values).
std::vector<double> holm_adjust(const std::vector<double>& p_values);
std::vector<double> bonferroni_adjust(const std::vector<double>& p_values);

double normal_two_sided_p(double statistic);

}  // namespace aggtreat
