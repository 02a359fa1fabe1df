#pragma once

#include <span>
#include <vector>

#include "symrl/numerics.hpp"
#include "symrl/transforms.hpp"

namespace symrl {

/// One declared action relation (transform j mapping slot src to slot out),
/// expressed against the canonical pair direction lo -> hi.
struct PairRelationRef {
    int transform;
    bool forward;  // true: out == hi (canonical direction), false: out == lo
    double sign;   // structural reflection sign of the declared relation
};

/// Pairs, singles and cycles extracted from the declared action indices, plus
/// the per-(transform, slot) recipe that rebuilds every global estimator from
/// the independent ones.
struct RelationGraph {
    struct Pair {
        int lo;
        int hi;
        double prior_m;  // declared multiplier of the canonical lo->hi map
        std::vector<PairRelationRef> relations;
        std::vector<int> cycles;  // indices into RelationGraph::cycles
    };
    struct Single {
        int slot;
        std::vector<int> transforms;  // transforms mapping slot to itself with -1
    };
    struct Recipe {
        enum class Kind { identity, single, pair };
        Kind kind = Kind::identity;
        int src = 0;
        int pair_index = -1;
        bool forward = true;
        int single_index = -1;  // fitted involution wrapper, if the slot has one
        bool negate = false;    // fixed sign wrapper when no single exists
    };

    int act_dim = 0;
    std::vector<Pair> pairs;
    std::vector<Single> singles;
    std::vector<std::vector<int>> cycles;        // slot sequences, length >= 3
    std::vector<std::vector<Recipe>> recipes;    // [transform][slot]

    int pair_index(int q, int u) const;
    int single_index(int slot) const;
};

RelationGraph extract_relation_graph(const std::vector<TransformSpec>& specs);

/// Linear parameters of the independent estimators (global nu or local zeta).
/// Singles are involutions by construction: y = -x + b.
struct EstimatorParams {
    struct Lin {
        double m = 1.0;
        double b = 0.0;
    };
    std::vector<Lin> pair;     // aligned with graph.pairs
    Vec single_b;              // aligned with graph.singles
};

/// Global parameters initialized from the declared multipliers, zero biases.
EstimatorParams initial_estimators(const RelationGraph& graph);

/// true iff y = m*x + b is an involution: m == -1, or m == 1 and b == 0.
bool involution_check(double m, double b);

/// Applies the composed global estimator g_hat_j to an action vector.
/// Throws near-singular error when an inverted pair estimator has |m| < 1e-6.
void compose_global_estimator(const RelationGraph& graph, const EstimatorParams& nu, int transform,
                              std::span<const double> a, Vec& out);
Vec compose_global_estimator(const RelationGraph& graph, const EstimatorParams& nu, int transform,
                             std::span<const double> a);

}  // namespace symrl
