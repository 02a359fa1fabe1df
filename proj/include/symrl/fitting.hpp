#pragma once

#include <optional>
#include <vector>

#include "symrl/losses.hpp"
#include "symrl/numerics.hpp"
#include "symrl/relation_graph.hpp"
#include "symrl/rollout.hpp"

namespace symrl {

/// Estimator form plus the penalty functions driving update and function
/// weights. H_U(x) = hu_max * hu_scale / (hu_scale + x^4); H_G(x) = hg_base^-x.
struct FitConfig {
    enum class Form { mx_plus_b, mx, b_only };
    Form form = Form::mx_plus_b;
    double hu_max = 0.05;
    double hu_scale = 0.01;
    double hg_base = 1.1;
    int k_i = 10;                  // target history window (fitting rounds)
    std::size_t min_dataset = 64;  // smaller datasets skip the round
    double min_abs_m = 1e-6;       // near-singular slope guard
};

double h_u(const FitConfig& cfg, double cycle_error);
double h_g(const FitConfig& cfg, double spread);

/// Fixed-capacity history of recent fit targets for one parameter.
class TargetHistory {
public:
    TargetHistory() = default;
    explicit TargetHistory(int capacity) : capacity_(capacity) {}
    void push(double v);
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    double mean() const;
    double stddev() const;  // population
    const Vec& values() const { return data_; }
    void set_capacity(int c) { capacity_ = c; }

private:
    int capacity_ = 10;
    std::size_t next_ = 0;
    Vec data_;
};

/// Coefficient-of-variation weight of one parameter history (1.0 when empty).
double function_weight(const TargetHistory& history, const FitConfig& cfg);

/// Mutable fitting state: the global estimators nu plus per-parameter target
/// histories and the per-estimator function weights derived from them.
struct FitState {
    EstimatorParams nu;
    std::vector<TargetHistory> pair_m_hist, pair_b_hist;
    std::vector<TargetHistory> single_b_hist;
    Vec w_g_pair, w_g_single;  // per-estimator weights, min over parameters

    static FitState init(const RelationGraph& graph, const FitConfig& cfg);
};

/// Outcome of one fitting round, for logging and tests.
struct FitRoundReport {
    struct Entry {
        bool fitted = false;
        double m = 0.0;
        double b = 0.0;
        std::size_t n = 0;
        double w_u = 0.0;
        double residual_rms = 0.0;
    };
    std::vector<Entry> pairs;
    std::vector<Entry> singles;
};

/// Dataset for the canonical lo->hi map of one pair: the four local-relation
/// section kinds (direct, reflected, inverse, inverse reflected) concatenated
/// over every transform containing the pair. gates, when given, drop steps
/// rejected by the dead zone of the sourcing transform.
Dataset1D build_pair_dataset(const RolloutBatch& batch, const RelationGraph& graph, int pair_index,
                             const GateOutputs* gates);

/// Dataset for one single: x = a_bar[q], y = a'_j[q] per containing transform.
Dataset1D build_single_dataset(const RolloutBatch& batch, const RelationGraph& graph,
                               int single_index, const GateOutputs* gates);

/// One round of the fitting pipeline: local OLS fits, cycle-error update
/// weights, EMA fold into nu, history append, function weight refresh.
FitRoundReport fit_round(const RolloutBatch& batch, const RelationGraph& graph,
                         const FitConfig& cfg, const GateOutputs* gates, FitState& state);

/// Function weights per (transform, action slot), flattened n_transforms x act,
/// from the estimators referenced by each recipe.
Vec function_weights_per_slot(const RelationGraph& graph, const FitState& state);

/// Ground-truth pair multipliers x_q / x_u from a perturbation modifier vector.
Vec ground_truth_multipliers(std::span<const double> action_modifiers,
                             const RelationGraph& graph);

}  // namespace symrl
