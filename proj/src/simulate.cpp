#include "aggtreat/simulate.hpp"

#include "aggtreat/chains.hpp"
#include "aggtreat/congruence.hpp"
#include "aggtreat/errors.hpp"
#include "aggtreat/rng.hpp"
#include "aggtreat/transport.hpp"

#include <algorithm>
#include <sstream>

namespace aggtreat {

Rational OutcomeModel::base_value(const SubVector& s, double resolution) const {
    switch (mode) {
        case OutcomeMode::free: {
            if (s.level() == 0) return baseline;
            auto it = values.find(s);
            if (it == values.end())
                throw ValidationError("outcome surface has no value for " + s.str());
            return it->second;
        }
        case OutcomeMode::homogeneous: {
            int level = s.level();
            if (level > static_cast<int>(betas.size()))
                throw ValidationError("homogeneous outcome model needs an increment for level " +
                                      std::to_string(level));
            Rational total = baseline;
            for (int g = 0; g < level; ++g) total += betas[static_cast<std::size_t>(g)];
            return total;
        }
        case OutcomeMode::linear:
            return baseline + theta * Rational(s.level()) * rational_of(resolution);
    }
    throw ValidationError("unknown outcome mode");
}

void ScenarioSpec::validate() const {
    grid.validate();
    if (types.paths.empty()) throw ValidationError("scenario needs at least one latent type");
    if (types.masses.size() != types.paths.size())
        throw ValidationError("each latent type needs a mass");
    Rational mass_sum = 0;
    for (const Rational& m : types.masses) {
        if (m < 0) throw ValidationError("type masses must be nonnegative");
        mass_sum += m;
    }
    if (mass_sum != 1) throw ValidationError("type masses must sum to 1, got " +
                                             fraction_string(mass_sum));
    int max_level = types.max_level();
    if (max_level < 1) throw ValidationError("latent paths must reach at least level 1");
    for (const LatentPath& path : types.paths) {
        if (static_cast<int>(path.at_level.size()) != max_level)
            throw ValidationError("all latent paths must cover the same levels");
        for (int d = 1; d <= max_level; ++d) {
            const SubVector& s = path.at(d);
            if (s.k() != grid.k)
                throw ValidationError("path vector " + s.str() + " does not match the grid");
            if (s.level() != d)
                throw ValidationError("path vector " + s.str() + " is not at level " +
                                      std::to_string(d));
        }
        if (types.congruent_only) {
            SubVector prev(std::vector<int>(static_cast<std::size_t>(grid.k), 0));
            for (int d = 1; d <= max_level; ++d) {
                if (!is_congruent(path.at(d), prev))
                    throw ValidationError("path is not congruent at level " + std::to_string(d));
                prev = path.at(d);
            }
        }
    }
    auto check_row = [&](const std::vector<Rational>& row, const std::string& what) {
        if (static_cast<int>(row.size()) != max_level + 1)
            throw ValidationError(what + " must list P(D=0..=" + std::to_string(max_level) + ")");
        Rational sum = 0;
        for (const Rational& p : row) {
            if (p < 0) throw ValidationError(what + " has a negative probability");
            sum += p;
        }
        if (sum != 1) throw ValidationError(what + " must sum to 1, got " + fraction_string(sum));
    };
    if (sorting.mode == SortingMode::independent) {
        check_row(sorting.d_marginal, "the level distribution");
    } else {
        if (sorting.d_by_type.size() != types.paths.size())
            throw ValidationError("table sorting needs one level row per type");
        for (std::size_t t = 0; t < sorting.d_by_type.size(); ++t)
            check_row(sorting.d_by_type[t], "level row for type " + std::to_string(t));
    }
    if (!outcome.type_offsets.empty() &&
        outcome.type_offsets.size() != types.paths.size())
        throw ValidationError("type offsets must match the number of types");
    if (outcome.noise_sd < 0) throw ValidationError("noise sd must be nonnegative");
    // the outcome surface must cover every reachable cell
    for (const LatentPath& path : types.paths)
        for (int d = 1; d <= max_level; ++d) outcome.base_value(path.at(d), grid.resolution);
}

namespace {

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            out.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    out.push_back(current);
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<Rational> decimal_row(const std::string& text) {
    std::vector<Rational> out;
    for (const std::string& item : split_on(text, ','))
        out.push_back(rational_from_decimal(strip(item)));
    return out;
}

}  // namespace

ScenarioSpec ScenarioSpec::from_file(const std::string& path) {
    return from_kv(KeyValueFile::parse_file(path));
}

ScenarioSpec ScenarioSpec::from_kv(const KeyValueFile& kv) {
    ScenarioSpec spec;
    spec.grid.resolution = kv.get_double_or("resolution", 1.0);
    spec.grid.names = kv.get_string_array("subtreatments");
    spec.grid.k = static_cast<int>(spec.grid.names.size());

    // types = ["mass | S(1) ; S(2) ; ...", ...]
    for (const std::string& line : kv.get_string_array("types")) {
        std::vector<std::string> parts = split_on(line, '|');
        if (parts.size() != 2) throw ValidationError("bad type entry: " + line);
        spec.types.masses.push_back(rational_from_decimal(strip(parts[0])));
        LatentPath path;
        for (const std::string& vec : split_on(parts[1], ';'))
            path.at_level.push_back(SubVector::parse(strip(vec)));
        spec.types.paths.push_back(std::move(path));
    }
    spec.types.congruent_only = kv.get_bool_or("congruent_only", false);

    std::string sorting = kv.get_string_or("sorting", "independent");
    if (sorting == "independent") {
        spec.sorting.mode = SortingMode::independent;
        for (const std::string& item : kv.get_string_array("d_probs"))
            spec.sorting.d_marginal.push_back(rational_from_decimal(strip(item)));
    } else if (sorting == "table") {
        spec.sorting.mode = SortingMode::table;
        for (const std::string& row : kv.get_string_array("d_table"))
            spec.sorting.d_by_type.push_back(decimal_row(row));
    } else {
        throw ValidationError("unknown sorting mode: " + sorting);
    }

    std::string mode = kv.get_string_or("outcome_mode", "free");
    if (mode == "free") {
        spec.outcome.mode = OutcomeMode::free;
        for (const std::string& entry : kv.get_string_array("outcome_values")) {
            std::vector<std::string> parts = split_on(entry, '=');
            if (parts.size() != 2) throw ValidationError("bad outcome entry: " + entry);
            spec.outcome.values[SubVector::parse(strip(parts[0]))] =
                rational_from_decimal(strip(parts[1]));
        }
    } else if (mode == "homogeneous") {
        spec.outcome.mode = OutcomeMode::homogeneous;
        for (const std::string& item : kv.get_string_array("outcome_betas"))
            spec.outcome.betas.push_back(rational_from_decimal(strip(item)));
    } else if (mode == "linear") {
        spec.outcome.mode = OutcomeMode::linear;
        spec.outcome.theta = rational_from_decimal(kv.get_string("outcome_theta"));
    } else {
        throw ValidationError("unknown outcome mode: " + mode);
    }
    if (kv.has("outcome_baseline"))
        spec.outcome.baseline = rational_from_decimal(kv.get_string("outcome_baseline"));
    spec.outcome.noise_sd = kv.get_double_or("noise_sd", 0.0);
    if (kv.has("type_offsets"))
        for (const std::string& item : kv.get_string_array("type_offsets"))
            spec.outcome.type_offsets.push_back(rational_from_decimal(strip(item)));

    spec.validate();
    return spec;
}

LatentPopulation::LatentPopulation(ScenarioSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int n_types = spec_.types.count();
    const int max_level = spec_.types.max_level();
    const auto zero = SubVector(std::vector<int>(static_cast<std::size_t>(spec_.grid.k), 0));
    auto path_at = [&](int type, int level) -> const SubVector& {
        return level == 0 ? zero : spec_.types.paths[static_cast<std::size_t>(type)].at(level);
    };
    auto offset_of = [&](int type) -> Rational {
        return spec_.outcome.type_offsets.empty()
                   ? Rational(0)
                   : spec_.outcome.type_offsets[static_cast<std::size_t>(type)];
    };

    level_mass_.assign(static_cast<std::size_t>(max_level) + 1, Rational(0));
    for (int t = 0; t < n_types; ++t) {
        const std::vector<Rational>& row = spec_.sorting.row(t);
        for (int d = 0; d <= max_level; ++d)
            level_mass_[static_cast<std::size_t>(d)] +=
                spec_.types.masses[static_cast<std::size_t>(t)] * row[static_cast<std::size_t>(d)];
    }

    stats_.grid = spec_.grid;
    stats_.n = 0;
    for (int d = 0; d <= max_level; ++d) {
        Rational pd = level_mass_[static_cast<std::size_t>(d)];
        if (pd == 0) continue;
        // joint mass on (cell, type) at this level
        std::map<SubVector, Rational> cell_mass;
        std::map<SubVector, Rational> cell_offset_mass;
        for (int t = 0; t < n_types; ++t) {
            Rational m = spec_.types.masses[static_cast<std::size_t>(t)] *
                         spec_.sorting.row(t)[static_cast<std::size_t>(d)];
            if (m == 0) continue;
            const SubVector& s = path_at(t, d);
            cell_mass[s] += m;
            cell_offset_mass[s] += m * offset_of(t);
        }
        PopulationStats::Level level;
        level.level = d;
        level.prob = pd;
        for (const auto& [s, mass] : cell_mass) {
            PopulationStats::Cell cell;
            cell.s = s;
            cell.prob = mass / pd;
            Rational mean_offset = cell_offset_mass[s] / mass;
            cell.mean = spec_.outcome.base_value(s, spec_.grid.resolution) + mean_offset;
            offset_by_cell_[s] = mean_offset;
            level.cells.push_back(std::move(cell));
        }
        level.mean_outcome = 0;
        for (const auto& cell : level.cells) level.mean_outcome += cell.prob * cell.mean;
        stats_.levels.push_back(std::move(level));
    }

    for (int d = 1; d <= max_level; ++d) {
        Rational window = level_mass_[static_cast<std::size_t>(d)] +
                          level_mass_[static_cast<std::size_t>(d - 1)];
        if (window == 0) continue;
        auto& cells = joint_.by_level[d];
        for (int t = 0; t < n_types; ++t) {
            const std::vector<Rational>& row = spec_.sorting.row(t);
            Rational m = spec_.types.masses[static_cast<std::size_t>(t)] *
                         (row[static_cast<std::size_t>(d)] + row[static_cast<std::size_t>(d - 1)]);
            if (m == 0) continue;
            cells[{path_at(t, d), path_at(t, d - 1)}] += m / window;
        }
    }
}

Rational LatentPopulation::potential_outcome(const SubVector& s) const {
    return spec_.outcome.base_value(s, spec_.grid.resolution);
}

Rational LatentPopulation::true_att(const SubVector& s) const {
    SubVector zero(std::vector<int>(static_cast<std::size_t>(spec_.grid.k), 0));
    return potential_outcome(s) - potential_outcome(zero);
}

Rational LatentPopulation::true_matt(const SubVector& hi, const SubVector& lo) const {
    return potential_outcome(hi) - potential_outcome(lo);
}

Rational LatentPopulation::untreated_bias(const SubVector& s) const {
    SubVector zero(std::vector<int>(static_cast<std::size_t>(spec_.grid.k), 0));
    auto it = offset_by_cell_.find(s);
    auto z = offset_by_cell_.find(zero);
    Rational at_s = it == offset_by_cell_.end() ? Rational(0) : it->second;
    Rational at_zero = z == offset_by_cell_.end() ? Rational(0) : z->second;
    return at_s - at_zero;
}

std::vector<int> LatentPopulation::lattice_caps() const {
    std::vector<int> caps(static_cast<std::size_t>(spec_.grid.k), 0);
    for (const LatentPath& path : spec_.types.paths)
        for (const SubVector& s : path.at_level)
            for (int i = 0; i < s.k(); ++i)
                caps[static_cast<std::size_t>(i)] = std::max(caps[static_cast<std::size_t>(i)], s[i]);
    // one spare unit so chain parents always fit
    for (int& c : caps) ++c;
    return caps;
}

LatentPopulation make_population(ScenarioSpec spec) { return LatentPopulation(std::move(spec)); }

Dataset generate(const ScenarioSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw ValidationError("need at least one unit");
    Rng rng(seed);
    const int n_types = spec.types.count();
    const int max_level = spec.types.max_level();
    std::vector<double> type_cdf;
    double acc = 0.0;
    for (int t = 0; t < n_types; ++t) {
        acc += to_double(spec.types.masses[static_cast<std::size_t>(t)]);
        type_cdf.push_back(acc);
    }
    SubVector zero(std::vector<int>(static_cast<std::size_t>(spec.grid.k), 0));

    Dataset data;
    data.grid = spec.grid;
    data.aggregation = Aggregation::sum;
    data.records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        int type = n_types - 1;
        for (int t = 0; t < n_types; ++t) {
            if (u < type_cdf[static_cast<std::size_t>(t)]) {
                type = t;
                break;
            }
        }
        const std::vector<Rational>& row = spec.sorting.row(type);
        double v = rng.uniform();
        int level = max_level;
        double cum = 0.0;
        for (int d = 0; d <= max_level; ++d) {
            cum += to_double(row[static_cast<std::size_t>(d)]);
            if (v < cum) {
                level = d;
                break;
            }
        }
        Record r;
        r.unit_id = "u" + std::to_string(i + 1);
        r.s = level == 0 ? zero : spec.types.paths[static_cast<std::size_t>(type)].at(level);
        Rational base = spec.outcome.base_value(r.s, spec.grid.resolution);
        if (!spec.outcome.type_offsets.empty())
            base += spec.outcome.type_offsets[static_cast<std::size_t>(type)];
        r.y = to_double(base) + spec.outcome.noise_sd * rng.normal();
        data.records.push_back(std::move(r));
    }
    return data;
}

void OracleReport::add(std::string name, std::string detail, Rational residual) {
    OracleCheck check;
    check.name = std::move(name);
    check.detail = std::move(detail);
    check.pass = residual == 0;
    check.residual = std::move(residual);
    all_pass = all_pass && check.pass;
    checks.push_back(std::move(check));
}

OracleReport oracle_check(const LatentPopulation& population) {
    OracleReport report;
    const PopulationStats& stats = population.stats();
    const ScenarioSpec& spec = population.spec();

    // potential-outcome surface over the full lattice, for decomposition terms
    // that step outside the realized support
    LatticeSpec lattice;
    lattice.caps = population.lattice_caps();
    PopulationStats surface;
    surface.grid = spec.grid;
    {
        std::map<int, PopulationStats::Level> levels;
        for (const SubVector& s : enumerate_lattice(lattice)) {
            PopulationStats::Cell cell;
            cell.s = s;
            cell.mean = population.potential_outcome(s);
            levels[s.level()].cells.push_back(std::move(cell));
        }
        for (auto& [level, l] : levels) {
            l.level = level;
            surface.levels.push_back(std::move(l));
        }
    }

    for (std::size_t a = 0; a + 1 < stats.levels.size(); ++a) {
        if (stats.levels[a + 1].level != stats.levels[a].level + 1) continue;
        int d = stats.levels[a + 1].level;
        std::string at = "d=" + std::to_string(d);
        Rational target = stats.levels[a + 1].mean_outcome - stats.levels[a].mean_outcome;

        WeightScheme product = product_weights(stats, d);
        report.add("marginal-identity/product", at,
                   weighted_matt_sum(product, stats) - target);
        MinIncongruentSolution lp = solve_min_incongruent(make_transport_problem(stats, d));
        report.add("marginal-identity/minimal", at,
                   weighted_matt_sum(lp.scheme, stats) - target);
        report.add("minimal-share-bounds", at,
                   lp.minimal_share < 0 || lp.minimal_share > 1 ? Rational(1) : Rational(0));

        // product-joint weights reproduce the congruent product average
        EstimandT<Rational> plus = amatt_plus(stats, d);
        LatentJoint product_form = product_joint(stats, d);
        EstimandT<Rational> tilde = amatt_tilde(stats, product_form, d);
        if (plus.defined && tilde.defined)
            report.add("amatt-product-joint", at, plus.value - tilde.value);
    }

    // decomposition identities over the full lattice
    std::vector<MarginalLevel> sets = marginal_sets(lattice);
    for (const MarginalLevel& set : sets) {
        for (const MarginalPair& pair : set.pairs) {
            if (pair.congruent) continue;
            Rational target = surface.cell_mean(pair.hi).value() - surface.cell_mean(pair.lo).value();
            for (DecomposeMode mode : {DecomposeMode::satt_form, DecomposeMode::matt_form}) {
                DecomposeResult result = decompose_incongruent(pair, mode);
                DecompositionValue<Rational> value = evaluate(*result.decomposition, surface);
                report.add(mode == DecomposeMode::satt_form ? "decompose/satt-form"
                                                            : "decompose/matt-form",
                           pair.hi.str() + "|" + pair.lo.str(), *value.value - target);
            }
        }
    }

    // the untreated-baseline route and its bias under selection
    if (stats.find_level(0)) {
        for (const auto& level : stats.levels) {
            if (level.level == 0) continue;
            for (const auto& cell : level.cells) {
                EstimandT<Rational> observed = att(stats, cell.s);
                report.add("att-bias-route", cell.s.str(),
                           observed.value - population.true_att(cell.s) -
                               population.untreated_bias(cell.s));
            }
            EstimandT<Rational> route_d = aatt(stats, level.level);
            Rational via_cells = 0;
            for (const auto& cell : level.cells)
                via_cells += cell.prob * att(stats, cell.s).value;
            report.add("aatt-two-route", "d=" + std::to_string(level.level),
                       route_d.value - via_cells);
        }
    }

    // regression reconstructions
    if (stats.levels.size() >= 2) {
        RegressionDecompositionT<Rational> reg = regression(stats);
        if (reg.marginal_route_defined)
            report.add("regression/marginal-route", "", *reg.marginal_reconstruction - reg.alpha1);
        if (reg.baseline_route_defined)
            report.add("regression/baseline-route", "", *reg.baseline_reconstruction - reg.alpha1);
        Rational weight_sum = 0;
        bool nonneg = true;
        for (const auto& term : reg.terms) {
            weight_sum += term.omega_marginal;
            nonneg = nonneg && term.omega_marginal >= 0;
        }
        report.add("regression/marginal-weights-sum", "", weight_sum - 1);
        report.add("regression/marginal-weights-nonnegative", "",
                   nonneg ? Rational(0) : Rational(1));
    }

    // homogeneous surfaces: every aggregate step equals the level increment
    if (spec.outcome.mode == OutcomeMode::homogeneous) {
        for (std::size_t a = 0; a + 1 < stats.levels.size(); ++a) {
            if (stats.levels[a + 1].level != stats.levels[a].level + 1) continue;
            int d = stats.levels[a + 1].level;
            Rational beta = spec.outcome.betas[static_cast<std::size_t>(d - 1)];
            if (!spec.outcome.type_offsets.empty()) continue;  // selection shifts the contrast
            report.add("homogeneous-delta", "d=" + std::to_string(d),
                       stats.levels[a + 1].mean_outcome - stats.levels[a].mean_outcome - beta);
        }
    }
    return report;
}

}  // namespace aggtreat
