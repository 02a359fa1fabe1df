#include "symrl/fitting.hpp"

#include <cmath>
#include <stdexcept>

namespace symrl {

double h_u(const FitConfig& cfg, double cycle_error) {
    const double e4 = cycle_error * cycle_error * cycle_error * cycle_error;
    return cfg.hu_max * cfg.hu_scale / (cfg.hu_scale + e4);
}

double h_g(const FitConfig& cfg, double spread) { return std::pow(cfg.hg_base, -spread); }

void TargetHistory::push(double v) {
    if (data_.size() < static_cast<std::size_t>(capacity_)) {
        data_.push_back(v);
    } else {
        data_[next_] = v;
        next_ = (next_ + 1) % data_.size();
    }
}

double TargetHistory::mean() const {
    if (data_.empty()) throw std::invalid_argument("TargetHistory::mean: empty history");
    double s = 0.0;
    for (double v : data_) s += v;
    return s / static_cast<double>(data_.size());
}

double TargetHistory::stddev() const {
    const double mu = mean();
    double s = 0.0;
    for (double v : data_) s += (v - mu) * (v - mu);
    return std::sqrt(s / static_cast<double>(data_.size()));
}

double function_weight(const TargetHistory& history, const FitConfig& cfg) {
    if (history.empty()) return 1.0;
    const double spread = history.stddev() / (std::abs(history.mean()) + 0.1);
    return h_g(cfg, spread);
}

FitState FitState::init(const RelationGraph& graph, const FitConfig& cfg) {
    FitState st;
    st.nu = initial_estimators(graph);
    st.pair_m_hist.assign(graph.pairs.size(), TargetHistory(cfg.k_i));
    st.pair_b_hist.assign(graph.pairs.size(), TargetHistory(cfg.k_i));
    st.single_b_hist.assign(graph.singles.size(), TargetHistory(cfg.k_i));
    st.w_g_pair.assign(graph.pairs.size(), 1.0);
    st.w_g_single.assign(graph.singles.size(), 1.0);
    return st;
}

Dataset1D build_pair_dataset(const RolloutBatch& batch, const RelationGraph& graph, int pair_index,
                             const GateOutputs* gates) {
    const auto& pair = graph.pairs.at(pair_index);
    if (pair.relations.empty())
        throw std::invalid_argument("build_pair_dataset: pair appears in no transform");
    Dataset1D d;
    for (const auto& rel : pair.relations) {
        const int j = rel.transform;
        for (int t = 0; t < batch.size; ++t) {
            if (gates && !gates->psi_at(j, t)) continue;
            if (rel.forward) {
                // Local relation lo->hi: inputs from a_bar, outputs from a'_j.
                d.add(rel.sign * batch.mean_action(t)[pair.lo], batch.sym_mean(j, t)[pair.hi]);
            } else {
                // Relation hi->lo re-expressed as lo->hi: swap input and output.
                d.add(rel.sign * batch.sym_mean(j, t)[pair.lo], batch.mean_action(t)[pair.hi]);
            }
        }
    }
    return d;
}

Dataset1D build_single_dataset(const RolloutBatch& batch, const RelationGraph& graph,
                               int single_index, const GateOutputs* gates) {
    const auto& single = graph.singles.at(single_index);
    Dataset1D d;
    for (int j : single.transforms) {
        for (int t = 0; t < batch.size; ++t) {
            if (gates && !gates->psi_at(j, t)) continue;
            d.add(batch.mean_action(t)[single.slot], batch.sym_mean(j, t)[single.slot]);
        }
    }
    return d;
}

namespace {

struct LocalFits {
    std::vector<char> pair_ok;
    std::vector<EstimatorParams::Lin> pair_zeta;
    std::vector<char> single_ok;
    Vec single_b;
};

double apply_lin(const EstimatorParams::Lin& p, bool forward, double x, double min_abs_m) {
    if (forward) return p.m * x + p.b;
    if (std::abs(p.m) < min_abs_m)
        throw std::domain_error("cycle evaluation: near-singular estimator");
    return (x - p.b) / p.m;
}

/// Max absolute deviation of the cycle composition from identity over the
/// probe points {-1, 0, 1}.
std::optional<double> cycle_error(const RelationGraph& graph, const LocalFits& fits,
                                  const std::vector<int>& cycle, double min_abs_m) {
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const int pi = graph.pair_index(cycle[k], cycle[(k + 1) % cycle.size()]);
        if (!fits.pair_ok[pi] || std::abs(fits.pair_zeta[pi].m) < min_abs_m) return std::nullopt;
    }
    double worst = 0.0;
    for (double probe : {-1.0, 0.0, 1.0}) {
        double v = probe;
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            const int q = cycle[k];
            const int u = cycle[(k + 1) % cycle.size()];
            const int pi = graph.pair_index(q, u);
            v = apply_lin(fits.pair_zeta[pi], q == graph.pairs[pi].lo, v, min_abs_m);
        }
        worst = std::max(worst, std::abs(v - probe));
    }
    return worst;
}

double residual_rms(const Dataset1D& d, double m, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = d.ys[i] - (m * d.xs[i] + b);
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(d.size()));
}

}  // namespace

FitRoundReport fit_round(const RolloutBatch& batch, const RelationGraph& graph,
                         const FitConfig& cfg, const GateOutputs* gates, FitState& state) {
    FitRoundReport report;
    report.pairs.resize(graph.pairs.size());
    report.singles.resize(graph.singles.size());

    LocalFits fits;
    fits.pair_ok.assign(graph.pairs.size(), 0);
    fits.pair_zeta.resize(graph.pairs.size());
    fits.single_ok.assign(graph.singles.size(), 0);
    fits.single_b.assign(graph.singles.size(), 0.0);

    // Local estimators, fitted from scratch on this batch.
    for (std::size_t p = 0; p < graph.pairs.size(); ++p) {
        Dataset1D d = build_pair_dataset(batch, graph, static_cast<int>(p), gates);
        auto& entry = report.pairs[p];
        entry.n = d.size();
        if (d.size() < cfg.min_dataset) continue;
        try {
            EstimatorParams::Lin zeta;
            switch (cfg.form) {
                case FitConfig::Form::mx_plus_b: {
                    const LineFit f = ols_fit_mb(d);
                    zeta = {f.m, f.b};
                    break;
                }
                case FitConfig::Form::mx:
                    zeta = {ols_fit_m_fixed_b(d), 0.0};
                    break;
                case FitConfig::Form::b_only: {
                    // Slope frozen at the declared prior; intercept by least squares.
                    const double m0 = graph.pairs[p].prior_m;
                    double acc = 0.0;
                    for (std::size_t i = 0; i < d.size(); ++i) acc += d.ys[i] - m0 * d.xs[i];
                    zeta = {m0, acc / static_cast<double>(d.size())};
                    break;
                }
            }
            if (std::abs(zeta.m) < cfg.min_abs_m) continue;  // near-singular, skip this round
            fits.pair_ok[p] = 1;
            fits.pair_zeta[p] = zeta;
            entry.fitted = true;
            entry.m = zeta.m;
            entry.b = zeta.b;
            entry.residual_rms = residual_rms(d, zeta.m, zeta.b);
        } catch (const std::domain_error&) {
            // Degenerate design: skip the update this round.
        }
    }
    for (std::size_t s = 0; s < graph.singles.size(); ++s) {
        Dataset1D d = build_single_dataset(batch, graph, static_cast<int>(s), gates);
        auto& entry = report.singles[s];
        entry.n = d.size();
        if (cfg.form == FitConfig::Form::mx) continue;  // singles have no free parameter
        if (d.size() < cfg.min_dataset) continue;
        fits.single_ok[s] = 1;
        fits.single_b[s] = ols_fit_b_single(d);
        entry.fitted = true;
        entry.m = -1.0;
        entry.b = fits.single_b[s];
        entry.residual_rms = residual_rms(d, -1.0, fits.single_b[s]);
    }

    // Update weights from cycle errors; singles and cycle-free pairs use max(H_U).
    const double w_max = h_u(cfg, 0.0);
    for (std::size_t p = 0; p < graph.pairs.size(); ++p) {
        if (!fits.pair_ok[p]) continue;
        double w_u = w_max;
        bool any_cycle = false;
        for (int c : graph.pairs[p].cycles) {
            const auto err = cycle_error(graph, fits, graph.cycles[c], cfg.min_abs_m);
            if (!err) continue;
            any_cycle = true;
            w_u = std::min(w_u, h_u(cfg, *err));
        }
        if (!any_cycle) w_u = w_max;
        report.pairs[p].w_u = w_u;

        auto& nu = state.nu.pair[p];
        const auto& zeta = fits.pair_zeta[p];
        nu.m += w_u * (zeta.m - nu.m);
        nu.b += w_u * (zeta.b - nu.b);
        state.pair_m_hist[p].push(zeta.m);
        if (cfg.form != FitConfig::Form::mx) state.pair_b_hist[p].push(zeta.b);
    }
    for (std::size_t s = 0; s < graph.singles.size(); ++s) {
        if (!fits.single_ok[s]) continue;
        report.singles[s].w_u = w_max;
        state.nu.single_b[s] += w_max * (fits.single_b[s] - state.nu.single_b[s]);
        state.single_b_hist[s].push(fits.single_b[s]);
    }

    // Function weights: per parameter, min-reduced per estimator.
    for (std::size_t p = 0; p < graph.pairs.size(); ++p)
        state.w_g_pair[p] = std::min(function_weight(state.pair_m_hist[p], cfg),
                                     function_weight(state.pair_b_hist[p], cfg));
    for (std::size_t s = 0; s < graph.singles.size(); ++s)
        state.w_g_single[s] = function_weight(state.single_b_hist[s], cfg);

    return report;
}

Vec function_weights_per_slot(const RelationGraph& graph, const FitState& state) {
    const int n = static_cast<int>(graph.recipes.size());
    Vec out(static_cast<std::size_t>(n) * graph.act_dim, 1.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < graph.act_dim; ++i) {
            const auto& r = graph.recipes[j][i];
            double w = 1.0;
            if (r.kind == RelationGraph::Recipe::Kind::single) {
                w = state.w_g_single[r.single_index];
            } else if (r.kind == RelationGraph::Recipe::Kind::pair) {
                w = state.w_g_pair[r.pair_index];
                if (r.single_index >= 0) w = std::min(w, state.w_g_single[r.single_index]);
            }
            out[static_cast<std::size_t>(j) * graph.act_dim + i] = w;
        }
    }
    return out;
}

Vec ground_truth_multipliers(std::span<const double> action_modifiers,
                             const RelationGraph& graph) {
    if (static_cast<int>(action_modifiers.size()) != graph.act_dim)
        throw std::invalid_argument("ground_truth_multipliers: modifier length mismatch");
    for (double x : action_modifiers)
        if (x == 0.0) throw std::domain_error("ground_truth_multipliers: zero modifier");
    Vec out(graph.pairs.size());
    for (std::size_t p = 0; p < graph.pairs.size(); ++p)
        out[p] = action_modifiers[graph.pairs[p].lo] / action_modifiers[graph.pairs[p].hi];
    return out;
}

}  // namespace symrl
