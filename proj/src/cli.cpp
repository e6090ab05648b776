#include "aggtreat/cli.hpp"

#include "aggtreat/config.hpp"
#include "aggtreat/dataset.hpp"
#include "aggtreat/errors.hpp"
#include "aggtreat/report.hpp"
#include "aggtreat/table1.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace aggtreat {

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("AGGTREAT_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationError("AGGTREAT_SEED is not an integer");
        }
    }
    return 42;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        if (text.empty() || text.back() != '\n') out << '\n';
        return;
    }
    std::ofstream file(out_path);
    if (!file) throw ValidationError("cannot write " + out_path);
    file << text;
    if (text.empty() || text.back() != '\n') file << '\n';
}

void emit_json(const Json& j, const std::string& out_path, std::ostream& out) {
    emit(j.dump(2), out_path, out);
}

int grid_level_for(double d_value, const GridSpec& grid) {
    double scaled = d_value / grid.resolution;
    int level = static_cast<int>(std::llround(scaled));
    if (std::abs(scaled - level) > 1e-9)
        throw ValidationError("level " + std::to_string(d_value) + " is not on the grid");
    return level;
}

struct LoadedStats {
    PopulationStats stats;
    std::optional<Dataset> data;
    Json config_echo;
};

/// Either the built-in application fixture or cell statistics derived from a
/// CSV dataset, converted to exact means for the weighting machinery.
LoadedStats load_stats(const std::string& input, const std::string& config_path, bool fixture) {
    LoadedStats loaded;
    if (fixture) {
        if (!input.empty())
            throw ValidationError("--fixture and an input file are mutually exclusive");
        loaded.stats = enrichment_fixture();
        loaded.config_echo["input"] = "builtin-fixture";
        return loaded;
    }
    if (input.empty()) throw ValidationError("an input CSV (or --fixture) is required");
    if (config_path.empty()) throw ValidationError("--config is required with a CSV input");
    DataConfig config = DataConfig::from_file(config_path);
    loaded.data = ingest(input, config);
    CellStats cells = build_cell_stats(*loaded.data);
    // exact view: doubles are dyadic rationals, so nothing is lost here
    loaded.stats.grid = cells.grid;
    loaded.stats.n = cells.n;
    for (const auto& level : cells.levels) {
        PopulationStats::Level l;
        l.level = level.level;
        l.prob = level.prob;
        l.count = level.count;
        for (const auto& cell : level.cells) {
            PopulationStats::Cell c;
            c.s = cell.s;
            c.prob = cell.prob;
            c.count = cell.count;
            c.mean = rational_of(cell.mean);
            l.cells.push_back(std::move(c));
        }
        l.mean_outcome = 0;
        for (const auto& c : l.cells) l.mean_outcome += c.prob * c.mean;
        loaded.stats.levels.push_back(std::move(l));
    }
    loaded.config_echo["input"] = input;
    loaded.config_echo["config"] = config_path;
    loaded.config_echo["resolution"] = config.grid.resolution;
    loaded.config_echo["subtreatments"] = config.grid.names;
    loaded.config_echo["outcome"] = config.outcome_column;
    loaded.config_echo["aggregation"] = to_string(config.aggregation);
    return loaded;
}

int cmd_count(const std::string& kind, int k, int series_max, const std::string& format,
              const std::string& out_path, std::ostream& out) {
    if (series_max > 0) {
        std::vector<FractionPoint> series = congruent_fraction_series(series_max, kind);
        if (format == "csv") {
            emit(fraction_series_csv(series), out_path, out);
        } else {
            Json j = report_header("count");
            j["kind"] = kind;
            j["series"] = to_json(series);
            emit_json(j, out_path, out);
        }
        return 0;
    }
    CountReport report = kind == "binary"    ? count_binary(k)
                         : kind == "trinary" ? count_trinary(k)
                                             : throw ValidationError("unknown kind: " + kind);
    if (format == "csv") {
        emit(count_report_csv(report), out_path, out);
    } else {
        Json j = report_header("count");
        j["report"] = to_json(report);
        emit_json(j, out_path, out);
    }
    return 0;
}

int cmd_weights(const LoadedStats& loaded, std::optional<double> d_value, const std::string& out_path,
                std::ostream& out) {
    const PopulationStats& stats = loaded.stats;
    Json j = report_header("weights", loaded.config_echo);
    DecreasingMeansReport means = decreasing_means_diagnostic(stats);
    auto solve_level = [&](int level) {
        MinIncongruentSolution solution =
            solve_min_incongruent(make_transport_problem(stats, level));
        Json e;
        e["level"] = level;
        e["d"] = level * stats.grid.resolution;
        e["minimal_share"] = rational_json(solution.minimal_share);
        e["scheme"] = to_json(solution.scheme);
        e["check_passes"] = check_scheme(solution.scheme, stats).pass;
        e["note"] = "one optimal scheme among possibly many; the share is the contract";
        return e;
    };
    if (d_value) {
        int level = grid_level_for(*d_value, stats.grid);
        j["result"] = solve_level(level);
    } else {
        j["levels"] = Json::array();
        for (std::size_t a = 0; a + 1 < stats.levels.size(); ++a) {
            if (stats.levels[a + 1].level != stats.levels[a].level + 1) continue;
            j["levels"].push_back(solve_level(stats.levels[a + 1].level));
        }
    }
    Json flags = Json::array();
    for (const DecreasingMeanFlag& flag : means.flags) {
        Json f;
        f["level"] = flag.level;
        f["d"] = flag.level * stats.grid.resolution;
        f["subtreatment"] = stats.grid.names[static_cast<std::size_t>(flag.coordinate)];
        flags.push_back(std::move(f));
    }
    j["flags"] = std::move(flags);
    emit_json(j, out_path, out);
    return 0;
}

int cmd_diagnose(const LoadedStats& loaded, const std::string& profile_csv_path,
                 const std::string& out_path, std::ostream& out) {
    IncongruencyReport report = incongruency_report(loaded.stats);
    Json j = report_header("diagnose", loaded.config_echo);
    j["report"] = to_json(report, loaded.stats.grid);
    if (!profile_csv_path.empty()) {
        std::ofstream file(profile_csv_path);
        if (!file) throw ValidationError("cannot write " + profile_csv_path);
        file << figure_profile_csv(report.means, loaded.stats.grid);
        j["profile_csv"] = profile_csv_path;
    }
    emit_json(j, out_path, out);
    return 0;
}

int cmd_decompose(const std::string& pair_text, const std::string& mode_text,
                  const LoadedStats* loaded, const std::string& out_path, std::ostream& out) {
    std::size_t bar = pair_text.find('|');
    if (bar == std::string::npos)
        throw ValidationError("--pair expects \"hi|lo\", e.g. \"1,1,0|0,0,1\"");
    SubVector hi = SubVector::parse(pair_text.substr(0, bar));
    SubVector lo = SubVector::parse(pair_text.substr(bar + 1));
    DecomposeMode mode = mode_text == "satt_form"   ? DecomposeMode::satt_form
                         : mode_text == "matt_form" ? DecomposeMode::matt_form
                                                    : throw ValidationError("unknown mode: " +
                                                                            mode_text);
    Json j = report_header("decompose", loaded ? loaded->config_echo : Json::object());
    j["mode"] = mode_text;

    SupportIndex support;
    const SupportIndex* support_ptr = nullptr;
    if (loaded && loaded->data) {
        support = build_support(*loaded->data);
        support_ptr = &support;
        j["bridges"] = "empirical";
    } else {
        j["bridges"] = "lattice";
    }

    if (hi.level() == lo.level()) {
        DecomposeResult result = decompose_satt(hi, lo, support_ptr);
        if (!result.ok()) {
            j["missing"] = result.missing->str();
        } else {
            j["decomposition"] = to_json(*result.decomposition);
        }
    } else {
        auto step = congruent_step(hi, lo);
        MarginalPair pair{hi, lo, step.has_value(), step};
        if (pair.congruent) {
            Decomposition direct;
            direct.target_hi = hi;
            direct.target_lo = lo;
            direct.terms.push_back({TermKind::matt_plus, hi, lo, +1});
            j["decomposition"] = to_json(direct);
        } else {
            DecomposeResult result = decompose_incongruent(pair, mode, support_ptr);
            if (!result.ok())
                j["missing"] = result.missing->str();
            else
                j["decomposition"] = to_json(*result.decomposition);
        }
    }
    emit_json(j, out_path, out);
    return 0;
}

int cmd_estimate(const Dataset& data, const Json& config_echo, bool all, int replicates,
                 std::uint64_t seed, const std::string& format, const std::string& out_path,
                 std::ostream& out) {
    CellStats stats = build_cell_stats(data);
    std::vector<EstimandRequest> requests = summary_requests();
    if (all) {
        for (const auto& level : stats.levels) {
            if (level.level <= 0) continue;
            for (EstimandKind kind : {EstimandKind::delta, EstimandKind::amatt_plus,
                                      EstimandKind::aatt, EstimandKind::scaled_aatt})
                requests.push_back({kind, std::nullopt, std::nullopt, level.level});
        }
    }

    std::vector<BootstrapResult> rows;
    if (replicates > 0) {
        rows = bootstrap(data, requests, replicates, seed);
    } else {
        for (const EstimandRequest& request : requests) {
            Estimand point = evaluate_estimand(stats, request);
            BootstrapResult row;
            row.request = request;
            row.defined = point.defined;
            row.point = point.defined ? point.value : 0.0;
            row.seed = seed;
            rows.push_back(row);
        }
    }

    if (format == "markdown") {
        emit(estimate_markdown(rows), out_path, out);
        return 0;
    }
    Json j = report_header("estimate", config_echo);
    j["bootstrap_replicates"] = replicates;
    j["seed"] = seed;
    j["estimands"] = Json::array();
    for (const BootstrapResult& row : rows) j["estimands"].push_back(to_json(row));
    emit_json(j, out_path, out);
    return 0;
}

int cmd_sutva(const Dataset& data, const Json& config_echo, double alpha,
              const std::string& finer_path, const std::string& finer_config_path,
              const std::string& adjustment, const std::string& out_path, std::ostream& out) {
    std::optional<Dataset> finer;
    if (!finer_path.empty()) {
        if (finer_config_path.empty())
            throw ValidationError("--finer needs --finer-config for its column layout");
        finer = ingest(finer_path, DataConfig::from_file(finer_config_path));
    }
    SutvaTestReport report = sutva_d_test(data, alpha, finer ? &*finer : nullptr, adjustment);
    Json j = report_header("sutva-test", config_echo);
    j["report"] = to_json(report, data.grid);
    emit_json(j, out_path, out);
    return 0;
}

int cmd_simulate(const std::string& spec_path, int n, std::uint64_t seed,
                 const std::string& out_csv, const std::string& truth_path, std::ostream& out) {
    ScenarioSpec spec = ScenarioSpec::from_file(spec_path);
    Dataset data = generate(spec, n, seed);
    {
        std::ofstream file(out_csv);
        if (!file) throw ValidationError("cannot write " + out_csv);
        write_csv(file, data);
    }
    LatentPopulation population = make_population(spec);
    OracleReport oracle = oracle_check(population);

    Json truth = report_header("simulate");
    truth["spec"] = spec_path;
    truth["n"] = n;
    truth["seed"] = seed;
    truth["population"] = to_json(population.stats());
    truth["latent_joint"] = to_json(population.latent_joint());
    Json estimands = Json::array();
    for (EstimandKind kind : {EstimandKind::overall_delta, EstimandKind::overall_amatt_plus,
                              EstimandKind::overall_aatt, EstimandKind::overall_scaled_aatt}) {
        EstimandT<Rational> value =
            evaluate_estimand(population.stats(), {kind, std::nullopt, std::nullopt, std::nullopt});
        Json e;
        e["kind"] = to_string(kind);
        e["defined"] = value.defined;
        if (value.defined) e["value"] = rational_json(value.value);
        estimands.push_back(std::move(e));
    }
    truth["population_estimands"] = std::move(estimands);
    truth["identity_checks"] = to_json(oracle);

    std::string sidecar = truth_path.empty() ? out_csv + ".truth.json" : truth_path;
    std::ofstream file(sidecar);
    if (!file) throw ValidationError("cannot write " + sidecar);
    file << truth.dump(2) << '\n';
    out << "wrote " << out_csv << " and " << sidecar << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"aggregated-treatment diagnostics and estimation"};
    app.require_subcommand(1);

    // count
    auto* count = app.add_subcommand("count", "pair counts for binary/trinary supports");
    std::string count_kind = "binary";
    int count_k = 0;
    int series_max = 0;
    std::string count_format = "json";
    count->add_option("--kind", count_kind, "binary or trinary");
    count->add_option("--k", count_k, "number of sub-treatments");
    count->add_option("--series", series_max, "emit the congruent-fraction series up to this K");
    count->add_option("--format", count_format, "json or csv");

    std::string input, config_path, out_path;
    bool use_fixture = false;

    // weights
    auto* weights = app.add_subcommand("weights", "minimally incongruent weighting schemes");
    std::optional<double> weights_level;
    double weights_level_raw = 0.0;
    weights->add_option("input", input, "CSV dataset");
    weights->add_option("--config", config_path, "dataset config file");
    weights->add_flag("--fixture,--table1-fixture", use_fixture, "use the built-in fixture");
    auto* level_opt = weights->add_option("--level", weights_level_raw, "aggregate level (original units)");
    weights->add_option("--out", out_path, "write the report here instead of stdout");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "incongruency report and profile data");
    std::string profile_csv;
    diagnose->add_option("input", input, "CSV dataset");
    diagnose->add_option("--config", config_path, "dataset config file");
    diagnose->add_flag("--fixture,--table1-fixture", use_fixture, "use the built-in fixture");
    diagnose->add_option("--profile-csv", profile_csv, "also write the mean-profile CSV here");
    diagnose->add_option("--out", out_path, "write the report here instead of stdout");

    // decompose
    auto* decompose = app.add_subcommand("decompose", "expand a pair into congruent terms");
    std::string pair_text, mode_text = "matt_form";
    decompose->add_option("--pair", pair_text, "\"hi|lo\" in grid units")->required();
    decompose->add_option("--mode", mode_text, "matt_form or satt_form");
    decompose->add_option("input", input, "CSV dataset (restricts bridges to observed cells)");
    decompose->add_option("--config", config_path, "dataset config file");
    decompose->add_option("--out", out_path, "write the report here instead of stdout");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "summary parameters with bootstrap errors");
    bool estimate_all = false;
    int replicates = 1000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string estimate_format = "json";
    estimate->add_option("input", input, "CSV dataset")->required();
    estimate->add_option("--config", config_path, "dataset config file")->required();
    estimate->add_flag("--all", estimate_all, "include every per-level parameter");
    estimate->add_option("--bootstrap", replicates, "bootstrap replicates (0 disables)");
    auto* seed_opt = estimate->add_option("--seed", seed, "master seed");
    estimate->add_option("--format", estimate_format, "json or markdown");
    estimate->add_option("--out", out_path, "write the report here instead of stdout");

    // sutva-test
    auto* sutva = app.add_subcommand("sutva-test", "within-level mean-difference tests");
    double alpha = 0.05;
    std::string finer_path, finer_config, adjustment = "holm";
    sutva->add_option("input", input, "CSV dataset")->required();
    sutva->add_option("--config", config_path, "dataset config file")->required();
    sutva->add_option("--alpha", alpha, "family-wise level");
    sutva->add_option("--finer", finer_path, "finer-grained CSV aligned row-by-row");
    sutva->add_option("--finer-config", finer_config, "config for the finer CSV");
    sutva->add_option("--adjustment", adjustment, "holm or bonferroni");
    sutva->add_option("--out", out_path, "write the report here instead of stdout");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "draw a dataset from a scenario");
    std::string spec_path, sim_out, truth_path;
    int sim_n = 0;
    std::uint64_t sim_seed = 0;
    bool sim_seed_given = false;
    simulate->add_option("--spec", spec_path, "scenario file")->required();
    simulate->add_option("--n", sim_n, "units to draw")->required();
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "master seed");
    simulate->add_option("--out", sim_out, "output CSV path")->required();
    simulate->add_option("--truth", truth_path, "ground-truth sidecar path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        seed_given = seed_opt->count() > 0;
        sim_seed_given = sim_seed_opt->count() > 0;
        if (!seed_given) seed = default_seed();
        if (!sim_seed_given) sim_seed = default_seed();
        if (level_opt->count() > 0) weights_level = weights_level_raw;

        if (count->parsed())
            return cmd_count(count_kind, count_k, series_max, count_format, out_path, out);
        if (weights->parsed()) {
            LoadedStats loaded = load_stats(input, config_path, use_fixture);
            return cmd_weights(loaded, weights_level, out_path, out);
        }
        if (diagnose->parsed()) {
            LoadedStats loaded = load_stats(input, config_path, use_fixture);
            return cmd_diagnose(loaded, profile_csv, out_path, out);
        }
        if (decompose->parsed()) {
            std::optional<LoadedStats> loaded;
            if (!input.empty()) loaded = load_stats(input, config_path, false);
            return cmd_decompose(pair_text, mode_text, loaded ? &*loaded : nullptr, out_path, out);
        }
        if (estimate->parsed()) {
            LoadedStats loaded = load_stats(input, config_path, false);
            Json echo = loaded.config_echo;
            return cmd_estimate(*loaded.data, echo, estimate_all, replicates, seed,
                                estimate_format, out_path, out);
        }
        if (sutva->parsed()) {
            LoadedStats loaded = load_stats(input, config_path, false);
            return cmd_sutva(*loaded.data, loaded.config_echo, alpha, finer_path, finer_config,
                             adjustment, out_path, out);
        }
        if (simulate->parsed())
            return cmd_simulate(spec_path, sim_n, sim_seed, sim_out, truth_path, out);
        err << "error: no command\n";
        return 1;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ComputationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace aggtreat
