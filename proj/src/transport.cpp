#include "aggtreat/transport.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace aggtreat {

Rational WeightScheme::total() const {
    Rational t = 0;
    for (const auto& row : w)
        for (const Rational& x : row) t += x;
    return t;
}

Rational WeightScheme::row_sum(std::size_t i) const {
    Rational t = 0;
    for (const Rational& x : w[i]) t += x;
    return t;
}

Rational WeightScheme::col_sum(std::size_t j) const {
    Rational t = 0;
    for (const auto& row : w) t += row[j];
    return t;
}

Rational WeightScheme::incongruent_mass() const {
    Rational t = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (w[i][j] != 0 && !is_congruent(rows[i], cols[j])) t += w[i][j];
    return t;
}

std::string to_string(WeightScheme::Provenance p) {
    switch (p) {
        case WeightScheme::Provenance::product: return "product";
        case WeightScheme::Provenance::minimally_incongruent: return "minimally_incongruent";
        case WeightScheme::Provenance::user: return "user";
    }
    return "user";
}

void TransportProblem::validate() const {
    if (rows.empty() || cols.empty())
        throw ValidationError("empty marginal set at level " + std::to_string(level));
    if (supplies.size() != rows.size() || demands.size() != cols.size())
        throw ValidationError("marginal sizes do not match the support");
    Rational supply_sum = 0, demand_sum = 0;
    for (const Rational& s : supplies) {
        if (s < 0) throw ValidationError("negative supply mass");
        supply_sum += s;
    }
    for (const Rational& d : demands) {
        if (d < 0) throw ValidationError("negative demand mass");
        demand_sum += d;
    }
    if (supply_sum != 1 || demand_sum != 1)
        throw ValidationError("unbalanced marginals at level " + std::to_string(level) +
                              ": supplies sum to " + fraction_string(supply_sum) +
                              ", demands to " + fraction_string(demand_sum));
    for (const SubVector& r : rows)
        if (r.level() != level)
            throw ValidationError("row vector " + r.str() + " is not at level " +
                                  std::to_string(level));
    for (const SubVector& c : cols)
        if (c.level() != level - 1)
            throw ValidationError("column vector " + c.str() + " is not at level " +
                                  std::to_string(level - 1));
}

TransportProblem TransportProblem::from_marginals(int level, std::vector<SubVector> rows,
                                                  std::vector<Rational> supplies,
                                                  std::vector<SubVector> cols,
                                                  std::vector<Rational> demands) {
    TransportProblem problem;
    problem.level = level;
    problem.rows = std::move(rows);
    problem.cols = std::move(cols);
    problem.supplies = std::move(supplies);
    problem.demands = std::move(demands);
    problem.validate();
    problem.congruent.assign(problem.rows.size(), std::vector<bool>(problem.cols.size(), false));
    for (std::size_t i = 0; i < problem.rows.size(); ++i)
        for (std::size_t j = 0; j < problem.cols.size(); ++j)
            problem.congruent[i][j] = is_congruent(problem.rows[i], problem.cols[j]);
    return problem;
}

TransportProblem TransportProblem::from_double_marginals(int level, std::vector<SubVector> rows,
                                                         const std::vector<double>& supplies,
                                                         std::vector<SubVector> cols,
                                                         const std::vector<double>& demands) {
    std::vector<Rational> s, d;
    for (double x : supplies) s.push_back(snap_to_rational(x));
    for (double x : demands) d.push_back(snap_to_rational(x));
    return from_marginals(level, std::move(rows), std::move(s), std::move(cols), std::move(d));
}

namespace {

using Flow = std::vector<std::vector<Rational>>;

/// Grow the congruent-cell flow to a maximum with shortest augmenting paths.
void max_congruent_flow(const TransportProblem& p, Flow& flow, std::vector<Rational>& rs,
                        std::vector<Rational>& rd) {
    const std::size_t R = p.rows.size();
    const std::size_t C = p.cols.size();
    while (true) {
        std::vector<int> row_parent(R, -2);  // -2 unvisited, -1 source, else col index
        std::vector<int> col_parent(C, -1);  // row index
        std::vector<bool> col_seen(C, false);
        std::deque<std::pair<bool, std::size_t>> queue;  // (is_row, index)
        for (std::size_t i = 0; i < R; ++i) {
            if (rs[i] > 0) {
                row_parent[i] = -1;
                queue.emplace_back(true, i);
            }
        }
        int reached = -1;
        while (!queue.empty() && reached < 0) {
            auto [is_row, idx] = queue.front();
            queue.pop_front();
            if (is_row) {
                for (std::size_t j = 0; j < C && reached < 0; ++j) {
                    if (!p.congruent[idx][j] || col_seen[j]) continue;
                    col_seen[j] = true;
                    col_parent[j] = static_cast<int>(idx);
                    if (rd[j] > 0)
                        reached = static_cast<int>(j);
                    else
                        queue.emplace_back(false, j);
                }
            } else {
                for (std::size_t i = 0; i < R; ++i) {
                    if (row_parent[i] != -2 || flow[i][idx] == 0) continue;
                    row_parent[i] = static_cast<int>(idx);
                    queue.emplace_back(true, i);
                }
            }
        }
        if (reached < 0) return;

        // bottleneck along source -> ... -> reached column
        std::size_t j = static_cast<std::size_t>(reached);
        Rational theta = rd[j];
        for (std::size_t i = static_cast<std::size_t>(col_parent[j]);;) {
            if (row_parent[i] == -1) {
                theta = std::min(theta, rs[i]);
                break;
            }
            std::size_t back = static_cast<std::size_t>(row_parent[i]);
            theta = std::min(theta, flow[i][back]);
            i = static_cast<std::size_t>(col_parent[back]);
        }
        rd[j] -= theta;
        for (std::size_t i = static_cast<std::size_t>(col_parent[j]);;) {
            flow[i][j] += theta;
            if (row_parent[i] == -1) {
                rs[i] -= theta;
                break;
            }
            j = static_cast<std::size_t>(row_parent[i]);
            flow[i][j] -= theta;
            i = static_cast<std::size_t>(col_parent[j]);
        }
    }
}

/// Cancel cycles in the support so the returned scheme is basic. At the
/// optimum every support cycle is cost-neutral, so pushing around it cannot
/// change the objective.
void prune_to_forest(const TransportProblem& p, Flow& flow) {
    const std::size_t R = p.rows.size();
    const std::size_t C = p.cols.size();
    const std::size_t N = R + C;  // rows first, then columns
    while (true) {
        auto neighbours = [&](std::size_t node) {
            std::vector<std::size_t> out;
            if (node < R) {
                for (std::size_t j = 0; j < C; ++j)
                    if (flow[node][j] > 0) out.push_back(R + j);
            } else {
                for (std::size_t i = 0; i < R; ++i)
                    if (flow[i][node - R] > 0) out.push_back(i);
            }
            return out;
        };

        // peel leaves; whatever survives lies on a cycle
        std::vector<int> degree(N, 0);
        std::vector<bool> alive(N, true);
        for (std::size_t node = 0; node < N; ++node)
            degree[node] = static_cast<int>(neighbours(node).size());
        bool peeled = true;
        while (peeled) {
            peeled = false;
            for (std::size_t node = 0; node < N; ++node) {
                if (!alive[node] || degree[node] > 1) continue;
                alive[node] = false;
                peeled = true;
                for (std::size_t other : neighbours(node))
                    if (alive[other]) --degree[other];
            }
        }
        std::size_t start = N;
        for (std::size_t node = 0; node < N; ++node) {
            if (alive[node]) {
                start = node;
                break;
            }
        }
        if (start == N) return;  // already a forest

        // walk along alive nodes until a node repeats, then cut the cycle out
        std::vector<std::size_t> path{start};
        std::vector<int> position(N, -1);
        position[start] = 0;
        std::size_t current = start;
        int prev = -1;
        std::size_t cycle_from = 0;
        while (true) {
            std::size_t next = N;
            for (std::size_t cand : neighbours(current)) {
                if (alive[cand] && static_cast<int>(cand) != prev) {
                    next = cand;
                    break;
                }
            }
            if (next == N) throw ComputationError("transport support walk dead-ended");
            if (position[next] >= 0) {
                cycle_from = static_cast<std::size_t>(position[next]);
                path.push_back(next);
                break;
            }
            position[next] = static_cast<int>(path.size());
            path.push_back(next);
            prev = static_cast<int>(current);
            current = next;
        }

        // edge list of the cycle, in traversal order
        std::vector<std::pair<std::size_t, std::size_t>> cycle;  // (row, col) cells
        for (std::size_t e = cycle_from; e + 1 < path.size(); ++e) {
            std::size_t a = path[e], b = path[e + 1];
            if (a < R)
                cycle.emplace_back(a, b - R);
            else
                cycle.emplace_back(b, a - R);
        }

        // Alternate +/- around the cycle; the two directions negate each other.
        // A direction that lowered the incongruent mass would contradict the
        // optimality of the flow, so the cycle must be cost-neutral.
        long long delta = 0;
        for (std::size_t e = 0; e < cycle.size(); ++e) {
            int cost = p.congruent[cycle[e].first][cycle[e].second] ? 0 : 1;
            delta += (e % 2 == 0) ? cost : -cost;
        }
        if (delta != 0) throw ComputationError("optimal transport support has a costed cycle");
        Rational theta = flow[cycle[1].first][cycle[1].second];
        for (std::size_t e = 1; e < cycle.size(); e += 2)
            theta = std::min(theta, flow[cycle[e].first][cycle[e].second]);
        for (std::size_t e = 0; e < cycle.size(); ++e) {
            if (e % 2 == 0)
                flow[cycle[e].first][cycle[e].second] += theta;
            else
                flow[cycle[e].first][cycle[e].second] -= theta;
        }
    }
}

}  // namespace

MinIncongruentSolution solve_min_incongruent(const TransportProblem& problem) {
    problem.validate();
    const std::size_t R = problem.rows.size();
    const std::size_t C = problem.cols.size();
    Flow flow(R, std::vector<Rational>(C, Rational(0)));
    std::vector<Rational> rs = problem.supplies;
    std::vector<Rational> rd = problem.demands;

    // greedy congruent seed, northwest-first
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            if (!problem.congruent[i][j] || rs[i] == 0 || rd[j] == 0) continue;
            Rational f = std::min(rs[i], rd[j]);
            flow[i][j] += f;
            rs[i] -= f;
            rd[j] -= f;
        }
    }
    max_congruent_flow(problem, flow, rs, rd);

    Rational congruent_total = 0;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) congruent_total += flow[i][j];

    // route what is left over the remaining (incongruent) cells
    std::size_t j = 0;
    for (std::size_t i = 0; i < R; ++i) {
        while (rs[i] > 0) {
            while (j < C && rd[j] == 0) ++j;
            if (j >= C) throw ComputationError("transport completion ran out of demand");
            Rational f = std::min(rs[i], rd[j]);
            flow[i][j] += f;
            rs[i] -= f;
            rd[j] -= f;
        }
    }
    prune_to_forest(problem, flow);

    MinIncongruentSolution solution;
    solution.minimal_share = 1 - congruent_total;
    solution.scheme.level = problem.level;
    solution.scheme.rows = problem.rows;
    solution.scheme.cols = problem.cols;
    solution.scheme.w = std::move(flow);
    solution.scheme.provenance = WeightScheme::Provenance::minimally_incongruent;
    return solution;
}

}  // namespace aggtreat
