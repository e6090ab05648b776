#include "aggtreat/report.hpp"

#include <iomanip>
#include <sstream>

namespace aggtreat {

namespace {

std::string format_double(double x) {
    std::ostringstream out;
    out << std::setprecision(12) << x;
    return out.str();
}

}  // namespace

Json report_header(const std::string& command, const Json& config_echo) {
    Json header;
    header["tool"] = "aggtreat";
    header["version"] = kVersion;
    header["command"] = command;
    if (!config_echo.empty()) header["config"] = config_echo;
    return header;
}

Json rational_json(const Rational& r) {
    Json j;
    j["value"] = to_double(r);
    j["exact"] = fraction_string(r);
    return j;
}

Json to_json(const CountReport& report) {
    Json j;
    j["k"] = report.k;
    j["kind"] = report.kind;
    j["total"] = report.total.str();
    j["congruent"] = report.congruent.str();
    j["incongruent"] = report.incongruent.str();
    j["per_level"] = Json::array();
    for (const auto& row : report.per_level) {
        Json r;
        r["level"] = row.level;
        r["total"] = row.total.str();
        r["congruent"] = row.congruent.str();
        r["incongruent"] = (row.total - row.congruent).str();
        j["per_level"].push_back(std::move(r));
    }
    return j;
}

CountReport count_report_from_json(const Json& j) {
    CountReport report;
    report.k = j.at("k").get<int>();
    report.kind = j.at("kind").get<std::string>();
    report.total = BigInt(j.at("total").get<std::string>());
    report.congruent = BigInt(j.at("congruent").get<std::string>());
    report.incongruent = BigInt(j.at("incongruent").get<std::string>());
    for (const Json& r : j.at("per_level")) {
        CountReport::PerLevel row;
        row.level = r.at("level").get<int>();
        row.total = BigInt(r.at("total").get<std::string>());
        row.congruent = BigInt(r.at("congruent").get<std::string>());
        report.per_level.push_back(std::move(row));
    }
    return report;
}

Json to_json(const std::vector<FractionPoint>& series) {
    Json j = Json::array();
    for (const FractionPoint& point : series) {
        Json p;
        p["k"] = point.k;
        p["congruent_fraction"] = rational_json(point.congruent_fraction);
        p["incongruent_fraction"] = rational_json(1 - point.congruent_fraction);
        j.push_back(std::move(p));
    }
    return j;
}

Json to_json(const WeightScheme& scheme) {
    Json j;
    j["level"] = scheme.level;
    j["provenance"] = to_string(scheme.provenance);
    j["entries"] = Json::array();
    for (std::size_t i = 0; i < scheme.rows.size(); ++i) {
        for (std::size_t jj = 0; jj < scheme.cols.size(); ++jj) {
            if (scheme.w[i][jj] == 0) continue;
            Json entry;
            entry["hi"] = scheme.rows[i].str();
            entry["lo"] = scheme.cols[jj].str();
            entry["weight"] = rational_json(scheme.w[i][jj]);
            entry["congruent"] = is_congruent(scheme.rows[i], scheme.cols[jj]);
            j["entries"].push_back(std::move(entry));
        }
    }
    return j;
}

WeightScheme weight_scheme_from_json(const Json& j) {
    WeightScheme scheme;
    scheme.level = j.at("level").get<int>();
    std::string provenance = j.at("provenance").get<std::string>();
    scheme.provenance = provenance == "product" ? WeightScheme::Provenance::product
                        : provenance == "minimally_incongruent"
                            ? WeightScheme::Provenance::minimally_incongruent
                            : WeightScheme::Provenance::user;
    std::map<SubVector, std::size_t> row_index, col_index;
    struct Entry {
        SubVector hi, lo;
        Rational w;
    };
    std::vector<Entry> entries;
    for (const Json& e : j.at("entries")) {
        Entry entry;
        entry.hi = SubVector::parse(e.at("hi").get<std::string>());
        entry.lo = SubVector::parse(e.at("lo").get<std::string>());
        std::string exact = e.at("weight").at("exact").get<std::string>();
        std::size_t slash = exact.find('/');
        entry.w = slash == std::string::npos
                      ? Rational(BigInt(exact))
                      : Rational(BigInt(exact.substr(0, slash)), BigInt(exact.substr(slash + 1)));
        row_index.emplace(entry.hi, 0);
        col_index.emplace(entry.lo, 0);
        entries.push_back(std::move(entry));
    }
    for (auto& [s, idx] : row_index) {
        idx = scheme.rows.size();
        scheme.rows.push_back(s);
    }
    for (auto& [s, idx] : col_index) {
        idx = scheme.cols.size();
        scheme.cols.push_back(s);
    }
    scheme.w.assign(scheme.rows.size(), std::vector<Rational>(scheme.cols.size(), Rational(0)));
    for (const Entry& entry : entries)
        scheme.w[row_index.at(entry.hi)][col_index.at(entry.lo)] = entry.w;
    return scheme;
}

Json to_json(const DecreasingMeansReport& report, const GridSpec& grid) {
    Json j;
    j["flags"] = Json::array();
    for (const DecreasingMeanFlag& flag : report.flags) {
        Json f;
        f["level"] = flag.level;
        f["d"] = flag.level * grid.resolution;
        f["coordinate"] = flag.coordinate;
        f["subtreatment"] = grid.names.empty() ? std::to_string(flag.coordinate)
                                               : grid.names[static_cast<std::size_t>(flag.coordinate)];
        f["mean_at_d"] = rational_json(flag.mean_hi);
        f["mean_below"] = rational_json(flag.mean_lo);
        j["flags"].push_back(std::move(f));
    }
    j["profile"] = Json::array();
    for (const SubTreatmentMeanPoint& point : report.series) {
        Json p;
        p["level"] = point.level;
        p["d"] = point.level * grid.resolution;
        p["subtreatment"] = grid.names.empty() ? std::to_string(point.coordinate)
                                               : grid.names[static_cast<std::size_t>(point.coordinate)];
        p["mean"] = point.mean;
        j["profile"].push_back(std::move(p));
    }
    return j;
}

Json to_json(const IncongruencyReport& report, const GridSpec& grid) {
    Json j;
    j["levels"] = Json::array();
    for (const auto& entry : report.levels) {
        Json e;
        e["level"] = entry.level;
        e["d"] = entry.level * grid.resolution;
        e["minimal_incongruent_share"] = rational_json(entry.minimal_share);
        e["scheme"] = to_json(entry.scheme);
        e["note"] = "one optimal scheme among possibly many; the share is the contract";
        j["levels"].push_back(std::move(e));
    }
    j["means"] = to_json(report.means, grid);
    return j;
}

Json to_json(const Decomposition& decomposition) {
    Json j;
    j["target_hi"] = decomposition.target_hi.str();
    j["target_lo"] = decomposition.target_lo.str();
    j["terms"] = Json::array();
    for (const DecompositionTerm& term : decomposition.terms) {
        Json t;
        t["kind"] = term.kind == TermKind::matt_plus ? "matt_plus" : "satt";
        t["hi"] = term.hi.str();
        t["lo"] = term.lo.str();
        t["sign"] = term.sign;
        j["terms"].push_back(std::move(t));
    }
    j["positive_terms"] = decomposition.positive_terms();
    j["negative_terms"] = decomposition.negative_terms();
    return j;
}

Json to_json(const Estimand& estimand) {
    Json j;
    j["parameter"] = estimand.request.label();
    j["kind"] = to_string(estimand.request.kind);
    if (estimand.request.level) j["level"] = *estimand.request.level;
    j["defined"] = estimand.defined;
    if (estimand.defined)
        j["estimate"] = estimand.value;
    else
        j["estimate"] = nullptr;
    if (!estimand.note.empty()) j["note"] = estimand.note;
    j["n_used"] = estimand.n_used;
    if (is_overall(estimand.request.kind) && estimand.dropped_mass != 0)
        j["dropped_treated_mass"] = rational_json(estimand.dropped_mass);
    return j;
}

Json to_json(const BootstrapResult& result) {
    Json j;
    j["parameter"] = result.request.label();
    j["kind"] = to_string(result.request.kind);
    j["defined"] = result.defined;
    if (result.defined)
        j["estimate"] = result.point;
    else
        j["estimate"] = nullptr;
    j["se"] = result.se;
    j["replicates_used"] = result.replicates_used;
    j["replicates_undefined"] = result.replicates_undefined;
    j["unreliable"] = result.unreliable;
    j["seed"] = result.seed;
    j["requires_subtreatment_data"] = needs_subtreatment_data(result.request.kind);
    j["incongruent_comparisons"] = carries_incongruent_comparisons(result.request.kind);
    return j;
}

Json to_json(const SutvaTestReport& report, const GridSpec& grid) {
    Json j;
    j["alpha"] = report.alpha;
    j["adjustment"] = report.adjustment;
    j["any_rejection"] = report.any_rejection;
    if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
    j["pairs"] = Json::array();
    for (const SutvaPairTest& pair : report.pairs) {
        Json p;
        p["level"] = pair.level;
        p["d"] = pair.level * grid.resolution;
        p["a"] = pair.a.str();
        p["b"] = pair.b.str();
        p["mean_difference"] = pair.mean_difference;
        p["statistic"] = pair.statistic;
        p["p_raw"] = pair.p_raw;
        p["p_adjusted"] = pair.p_adjusted;
        p["reject"] = pair.reject;
        j["pairs"].push_back(std::move(p));
    }
    j["skipped_cells"] = Json::array();
    for (const SubVector& s : report.skipped_cells) j["skipped_cells"].push_back(s.str());
    return j;
}

Json to_json(const RegressionDecomposition& regression, const GridSpec& grid) {
    Json j;
    j["alpha1"] = regression.alpha1;
    j["alpha1_per_grid_step"] = regression.alpha1_step;
    j["mean_level"] = rational_json(regression.mean_level);
    j["var_level"] = rational_json(regression.var_level);
    j["terms"] = Json::array();
    for (const auto& term : regression.terms) {
        Json t;
        t["level"] = term.level;
        t["d"] = term.level * grid.resolution;
        t["omega_marginal"] = rational_json(term.omega_marginal);
        t["omega_baseline"] = rational_json(term.omega_baseline);
        if (term.delta_step) t["delta_step"] = *term.delta_step;
        if (term.baseline_per_unit) t["baseline_per_unit"] = *term.baseline_per_unit;
        j["terms"].push_back(std::move(t));
    }
    j["marginal_route_defined"] = regression.marginal_route_defined;
    j["baseline_route_defined"] = regression.baseline_route_defined;
    if (regression.marginal_reconstruction)
        j["marginal_reconstruction"] = *regression.marginal_reconstruction;
    if (regression.baseline_reconstruction)
        j["baseline_reconstruction"] = *regression.baseline_reconstruction;
    return j;
}

Json to_json(const OracleReport& report) {
    Json j;
    j["all_pass"] = report.all_pass;
    j["checks"] = Json::array();
    for (const OracleCheck& check : report.checks) {
        Json c;
        c["name"] = check.name;
        if (!check.detail.empty()) c["detail"] = check.detail;
        c["residual"] = rational_json(check.residual);
        c["pass"] = check.pass;
        j["checks"].push_back(std::move(c));
    }
    return j;
}

Json to_json(const PopulationStats& stats) {
    Json j;
    j["resolution"] = stats.grid.resolution;
    j["subtreatments"] = stats.grid.names;
    j["levels"] = Json::array();
    for (const auto& level : stats.levels) {
        Json l;
        l["level"] = level.level;
        l["d"] = level.level * stats.grid.resolution;
        l["prob"] = rational_json(level.prob);
        l["mean_outcome"] = rational_json(level.mean_outcome);
        l["cells"] = Json::array();
        for (const auto& cell : level.cells) {
            Json c;
            c["s"] = cell.s.str();
            c["prob"] = rational_json(cell.prob);
            c["mean"] = rational_json(cell.mean);
            l["cells"].push_back(std::move(c));
        }
        j["levels"].push_back(std::move(l));
    }
    return j;
}

Json to_json(const LatentJoint& joint) {
    Json j = Json::array();
    for (const auto& [level, cells] : joint.by_level) {
        Json l;
        l["level"] = level;
        l["pairs"] = Json::array();
        for (const auto& [pair, mass] : cells) {
            if (mass == 0) continue;
            Json p;
            p["hi"] = pair.first.str();
            p["lo"] = pair.second.str();
            p["mass"] = rational_json(mass);
            l["pairs"].push_back(std::move(p));
        }
        j.push_back(std::move(l));
    }
    return j;
}

std::string fraction_series_csv(const std::vector<FractionPoint>& series) {
    std::ostringstream out;
    out << "K,congruent_fraction,incongruent_fraction\n";
    for (const FractionPoint& point : series)
        out << point.k << ',' << format_double(to_double(point.congruent_fraction)) << ','
            << format_double(to_double(1 - point.congruent_fraction)) << '\n';
    return out.str();
}

std::string figure_profile_csv(const DecreasingMeansReport& report, const GridSpec& grid) {
    std::ostringstream out;
    out << "d,subtreatment,mean\n";
    for (const SubTreatmentMeanPoint& point : report.series) {
        std::string name = grid.names.empty()
                               ? std::to_string(point.coordinate)
                               : grid.names[static_cast<std::size_t>(point.coordinate)];
        out << format_double(point.level * grid.resolution) << ',' << name << ','
            << format_double(point.mean) << '\n';
    }
    return out.str();
}

std::string count_report_csv(const CountReport& report) {
    std::ostringstream out;
    out << "level,total,congruent,incongruent\n";
    for (const auto& row : report.per_level)
        out << row.level << ',' << row.total.str() << ',' << row.congruent.str() << ','
            << (row.total - row.congruent).str() << '\n';
    out << "all," << report.total.str() << ',' << report.congruent.str() << ','
        << report.incongruent.str() << '\n';
    return out.str();
}

std::string estimate_markdown(const std::vector<BootstrapResult>& rows) {
    std::ostringstream out;
    out << "| Parameter | Estimate | S data | Incongruity |\n";
    out << "|---|---|---|---|\n";
    for (const BootstrapResult& row : rows) {
        out << "| " << row.request.label() << " | ";
        if (row.defined) {
            out << std::setprecision(4) << row.point;
            if (row.replicates_used > 0) out << " (" << std::setprecision(4) << row.se << ")";
        } else {
            out << "NA";
        }
        out << " | " << (needs_subtreatment_data(row.request.kind) ? "x" : " ") << " | "
            << (carries_incongruent_comparisons(row.request.kind) ? "x" : " ") << " |\n";
    }
    return out.str();
}

}  // namespace aggtreat
