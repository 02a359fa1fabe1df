#include "symrl/relation_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace symrl {

int RelationGraph::pair_index(int q, int u) const {
    const int lo = std::min(q, u), hi = std::max(q, u);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].lo == lo && pairs[i].hi == hi) return static_cast<int>(i);
    return -1;
}

int RelationGraph::single_index(int slot) const {
    for (std::size_t i = 0; i < singles.size(); ++i)
        if (singles[i].slot == slot) return static_cast<int>(i);
    return -1;
}

namespace {

// Enumerates simple cycles of length >= 3 in the undirected pair graph,
// deduplicated up to rotation and reversal: each cycle starts at its smallest
// slot and runs toward the smaller of the two neighbors.
void enumerate_cycles(int n, const std::vector<std::vector<int>>& adj,
                      std::vector<std::vector<int>>& cycles) {
    std::vector<int> path;
    std::vector<char> on_path(n, 0);
    auto dfs = [&](auto&& self, int start, int v) -> void {
        for (int u : adj[v]) {
            if (u == start && path.size() >= 3) {
                if (path[1] < path.back()) cycles.push_back(path);
            } else if (u > start && !on_path[u]) {
                on_path[u] = 1;
                path.push_back(u);
                self(self, start, u);
                path.pop_back();
                on_path[u] = 0;
            }
        }
    };
    for (int s = 0; s < n; ++s) {
        path.assign(1, s);
        on_path.assign(n, 0);
        on_path[s] = 1;
        dfs(dfs, s, s);
    }
}

}  // namespace

RelationGraph extract_relation_graph(const std::vector<TransformSpec>& specs) {
    if (specs.empty()) throw std::invalid_argument("extract_relation_graph: no transforms");
    const int n = specs.front().act_dim();
    for (const auto& t : specs)
        if (t.act_dim() != n)
            throw std::invalid_argument("extract_relation_graph: transform '" + t.name +
                                        "' has inconsistent action dimension");

    RelationGraph g;
    g.act_dim = n;

    // Singles first: slots mapped to themselves with a non-identity multiplier.
    std::set<int> single_slots;
    for (const auto& t : specs)
        for (int u = 0; u < n; ++u)
            if (t.act_indices[u] == u && t.act_multipliers[u] != 1.0) {
                if (std::abs(std::abs(t.act_multipliers[u]) - 1.0) > 1e-12)
                    throw std::invalid_argument(
                        "transform '" + t.name + "': reflexive relation on slot " +
                        std::to_string(u) + " must be involutory (multiplier -1)");
                single_slots.insert(u);
            }
    for (int s : single_slots) g.singles.push_back({s, {}});

    // Pairs with canonical lo->hi priors, consistency-checked across transforms.
    std::set<std::pair<int, int>> pair_keys;
    for (const auto& t : specs)
        for (int u = 0; u < n; ++u) {
            const int q = t.act_indices[u];
            if (q != u) pair_keys.insert({std::min(q, u), std::max(q, u)});
        }
    for (const auto& [lo, hi] : pair_keys) g.pairs.push_back({lo, hi, 0.0, {}, {}});

    for (std::size_t j = 0; j < specs.size(); ++j) {
        const auto& t = specs[j];
        for (int u = 0; u < n; ++u) {
            const int q = t.act_indices[u];
            const double d = t.act_multipliers[u];
            if (q == u) {
                if (d != 1.0) {
                    const int si = g.single_index(u);
                    g.singles[si].transforms.push_back(static_cast<int>(j));
                }
                continue;
            }
            const int pi = g.pair_index(q, u);
            auto& pair = g.pairs[pi];
            const bool forward = (u == pair.hi);
            const double m0 = forward ? std::abs(d) : 1.0 / std::abs(d);
            if (pair.prior_m == 0.0) {
                pair.prior_m = m0;
            } else if (std::abs(pair.prior_m - m0) > 1e-9 * std::max(1.0, std::abs(m0))) {
                throw std::invalid_argument(
                    "transform '" + t.name + "': slot " + std::to_string(u) +
                    " declares a multiplier inconsistent with pair (" + std::to_string(pair.lo) +
                    "," + std::to_string(pair.hi) + ")");
            }
            pair.relations.push_back({static_cast<int>(j), forward, d < 0.0 ? -1.0 : 1.0});
        }
    }

    // Cycles over the undirected pair graph.
    std::vector<std::vector<int>> adj(n);
    for (const auto& p : g.pairs) {
        adj[p.lo].push_back(p.hi);
        adj[p.hi].push_back(p.lo);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    enumerate_cycles(n, adj, g.cycles);
    for (std::size_t c = 0; c < g.cycles.size(); ++c) {
        const auto& cyc = g.cycles[c];
        for (std::size_t k = 0; k < cyc.size(); ++k) {
            const int pi = g.pair_index(cyc[k], cyc[(k + 1) % cyc.size()]);
            g.pairs[pi].cycles.push_back(static_cast<int>(c));
        }
    }
    for (auto& p : g.pairs) {
        std::sort(p.cycles.begin(), p.cycles.end());
        p.cycles.erase(std::unique(p.cycles.begin(), p.cycles.end()), p.cycles.end());
    }

    // Per-(transform, slot) recipes.
    g.recipes.resize(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j) {
        auto& row = g.recipes[j];
        row.resize(n);
        const auto& t = specs[j];
        for (int u = 0; u < n; ++u) {
            const int q = t.act_indices[u];
            const double d = t.act_multipliers[u];
            RelationGraph::Recipe& r = row[u];
            r.src = q;
            if (q == u && d == 1.0) {
                r.kind = RelationGraph::Recipe::Kind::identity;
            } else if (q == u) {
                r.kind = RelationGraph::Recipe::Kind::single;
                r.single_index = g.single_index(u);
            } else {
                r.kind = RelationGraph::Recipe::Kind::pair;
                r.pair_index = g.pair_index(q, u);
                r.forward = (u == g.pairs[r.pair_index].hi);
                if (d < 0.0) {
                    const int si = g.single_index(u);
                    if (si >= 0)
                        r.single_index = si;
                    else
                        r.negate = true;
                }
            }
        }
    }
    return g;
}

EstimatorParams initial_estimators(const RelationGraph& graph) {
    EstimatorParams nu;
    nu.pair.resize(graph.pairs.size());
    for (std::size_t i = 0; i < graph.pairs.size(); ++i)
        nu.pair[i] = {graph.pairs[i].prior_m, 0.0};
    nu.single_b.assign(graph.singles.size(), 0.0);
    return nu;
}

bool involution_check(double m, double b) {
    return std::abs(m + 1.0) <= 1e-12 || (std::abs(m - 1.0) <= 1e-12 && std::abs(b) <= 1e-12);
}

void compose_global_estimator(const RelationGraph& graph, const EstimatorParams& nu, int transform,
                              std::span<const double> a, Vec& out) {
    if (static_cast<int>(a.size()) != graph.act_dim)
        throw std::invalid_argument("compose_global_estimator: action dimension mismatch");
    out.resize(a.size());
    const auto& row = graph.recipes.at(transform);
    for (int u = 0; u < graph.act_dim; ++u) {
        const auto& r = row[u];
        const double x = a[r.src];
        double y = 0.0;
        switch (r.kind) {
            case RelationGraph::Recipe::Kind::identity:
                y = x;
                break;
            case RelationGraph::Recipe::Kind::single:
                y = -x + nu.single_b[r.single_index];
                break;
            case RelationGraph::Recipe::Kind::pair: {
                const auto& p = nu.pair[r.pair_index];
                if (r.forward) {
                    y = p.m * x + p.b;
                } else {
                    if (std::abs(p.m) < 1e-6)
                        throw std::domain_error(
                            "compose_global_estimator: near-singular inverted estimator");
                    y = (x - p.b) / p.m;
                }
                if (r.single_index >= 0)
                    y = -y + nu.single_b[r.single_index];
                else if (r.negate)
                    y = -y;
                break;
            }
        }
        out[u] = y;
    }
}

Vec compose_global_estimator(const RelationGraph& graph, const EstimatorParams& nu, int transform,
                             std::span<const double> a) {
    Vec out;
    compose_global_estimator(graph, nu, transform, a, out);
    return out;
}

}  // namespace symrl
