#include "aggtreat/inference.hpp"

#include "aggtreat/errors.hpp"
#include "aggtreat/rng.hpp"
#include "aggtreat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace aggtreat {

std::vector<BootstrapResult> bootstrap(const Dataset& data,
                                       const std::vector<EstimandRequest>& requests,
                                       int total_replicates, std::uint64_t seed,
                                       const LatentJoint* joint) {
    if (total_replicates < 2) throw ValidationError("bootstrap needs at least two replicates");
    if (data.records.empty()) throw ValidationError("bootstrap needs data");

    CellStats full = build_cell_stats(data);
    std::vector<BootstrapResult> results(requests.size());
    for (std::size_t q = 0; q < requests.size(); ++q) {
        Estimand point = evaluate_estimand(full, requests[q], joint);
        results[q].request = requests[q];
        results[q].defined = point.defined;
        results[q].point = point.defined ? point.value : 0.0;
        results[q].seed = seed;
    }

    const std::size_t n = data.records.size();
    std::vector<std::vector<double>> draws(requests.size());
    Dataset replicate;
    replicate.grid = data.grid;
    replicate.aggregation = data.aggregation;
    replicate.records.resize(n);
    for (int b = 0; b < total_replicates; ++b) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(b)));
        for (std::size_t i = 0; i < n; ++i)
            replicate.records[i] = data.records[rng.uniform_below(n)];
        CellStats stats = build_cell_stats(replicate);
        for (std::size_t q = 0; q < requests.size(); ++q) {
            Estimand value = evaluate_estimand(stats, requests[q], joint);
            if (value.defined)
                draws[q].push_back(value.value);
            else
                ++results[q].replicates_undefined;
        }
    }

    for (std::size_t q = 0; q < requests.size(); ++q) {
        BootstrapResult& r = results[q];
        r.replicates_used = static_cast<int>(draws[q].size());
        r.unreliable = r.replicates_undefined * 2 >= total_replicates;
        if (r.replicates_used >= 2) {
            double mean = std::accumulate(draws[q].begin(), draws[q].end(), 0.0) /
                          static_cast<double>(r.replicates_used);
            double ss = 0.0;
            for (double v : draws[q]) ss += (v - mean) * (v - mean);
            r.se = std::sqrt(ss / static_cast<double>(r.replicates_used - 1));
        }
    }
    return results;
}

double normal_two_sided_p(double statistic) {
    if (std::isinf(statistic)) return 0.0;
    return std::erfc(std::abs(statistic) / std::sqrt(2.0));
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m);
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        double scaled = std::min(1.0, static_cast<double>(m - rank) * p_values[order[rank]]);
        running = std::max(running, scaled);
        adjusted[order[rank]] = running;
    }
    return adjusted;
}

std::vector<double> bonferroni_adjust(const std::vector<double>& p_values) {
    std::vector<double> adjusted;
    adjusted.reserve(p_values.size());
    for (double p : p_values)
        adjusted.push_back(std::min(1.0, p * static_cast<double>(p_values.size())));
    return adjusted;
}

namespace {

struct CellSamples {
    SubVector s;       // label used in the report
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t n = 0;

    double mean() const { return sum / static_cast<double>(n); }
    double variance() const {
        return (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
    }
};

double welch_statistic(const CellSamples& a, const CellSamples& b) {
    double se2 = a.variance() / static_cast<double>(a.n) + b.variance() / static_cast<double>(b.n);
    double diff = a.mean() - b.mean();
    if (se2 <= 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / std::sqrt(se2);
}

}  // namespace

SutvaTestReport sutva_d_test(const Dataset& data, double alpha, const Dataset* finer,
                             const std::string& adjustment) {
    if (adjustment != "holm" && adjustment != "bonferroni")
        throw ValidationError("unknown adjustment: " + adjustment);
    if (finer && finer->records.size() != data.records.size())
        throw ValidationError("the finer dataset must align row-by-row with the coarse one");

    SutvaTestReport report;
    report.alpha = alpha;
    report.adjustment = adjustment;

    // Group outcomes by comparison stratum. Without a finer dataset the
    // stratum is the aggregate level and cells are the observed vectors;
    // with one, the stratum is the coarse cell and cells are the finer
    // vectors observed inside it.
    std::map<std::pair<int, SubVector>, std::map<SubVector, CellSamples>> strata;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const Record& r = data.records[i];
        std::pair<int, SubVector> stratum;
        SubVector cell_label;
        if (finer) {
            stratum = {r.s.level(), r.s};
            cell_label = finer->records[i].s;
        } else {
            stratum = {r.s.level(), SubVector{}};
            cell_label = r.s;
        }
        CellSamples& cell = strata[stratum][cell_label];
        cell.s = cell_label;
        cell.sum += r.y;
        cell.sum_sq += r.y * r.y;
        ++cell.n;
    }

    std::vector<double> raw;
    for (const auto& [stratum, cells] : strata) {
        std::vector<const CellSamples*> eligible;
        for (const auto& [label, cell] : cells) {
            if (cell.n >= 2)
                eligible.push_back(&cell);
            else
                report.skipped_cells.push_back(cell.s);
        }
        for (std::size_t a = 0; a < eligible.size(); ++a) {
            for (std::size_t b = a + 1; b < eligible.size(); ++b) {
                SutvaPairTest test;
                test.level = stratum.first;
                test.a = eligible[a]->s;
                test.b = eligible[b]->s;
                test.mean_difference = eligible[a]->mean() - eligible[b]->mean();
                test.statistic = welch_statistic(*eligible[a], *eligible[b]);
                test.p_raw = normal_two_sided_p(test.statistic);
                report.pairs.push_back(test);
                raw.push_back(test.p_raw);
            }
        }
    }

    if (report.pairs.empty()) {
        report.diagnostic = "no level has two cells with at least two observations each";
        return report;
    }
    std::vector<double> adjusted =
        adjustment == "holm" ? holm_adjust(raw) : bonferroni_adjust(raw);
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        report.pairs[i].p_adjusted = adjusted[i];
        report.pairs[i].reject = adjusted[i] <= alpha;
        report.any_rejection = report.any_rejection || report.pairs[i].reject;
    }
    return report;
}

}  // namespace aggtreat
