#include "symrl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace symrl {

double clipped_surrogate(double ratio, double advantage, double eps) {
    const double sgn = advantage > 0.0 ? 1.0 : (advantage < 0.0 ? -1.0 : 0.0);
    const double bound = (1.0 + sgn * eps) * advantage;
    return std::min(ratio * advantage, bound);
}

UpdateContext UpdateContext::prepare(const RolloutBatch& batch, const PpoConfig& ppo,
                                     const SymLossConfig& sym,
                                     const std::vector<TransformSpec>& specs,
                                     const GaussianPolicy& policy, const RelationGraph* graph,
                                     const EstimatorParams* nu, const Vec* w_g,
                                     const GateOutputs* gates) {
    UpdateContext ctx;
    ctx.batch = &batch;
    ctx.ppo = &ppo;
    ctx.sym = &sym;
    ctx.specs = &specs;
    ctx.graph = graph;
    ctx.nu = nu;
    ctx.gates = gates;
    ctx.theta_last = PolicySnapshot::of(policy);

    const int n = batch.n_transforms;
    const int act = batch.act_dim;
    if (sym.method == SymMethod::asl) {
        if (w_g)
            ctx.w_g = *w_g;
        else
            ctx.w_g.assign(static_cast<std::size_t>(n) * act, 1.0);
    }
    if (sym.method == SymMethod::psl) {
        Vec sigma_old = policy.sigma();
        ctx.psl_denominator_log.assign(static_cast<std::size_t>(n) * batch.size, 0.0);
        ctx.psl_g_mean.assign(static_cast<std::size_t>(n) * batch.size * act, 0.0);
        Vec gm;
        for (int j = 0; j < n; ++j) {
            for (int t = 0; t < batch.size; ++t) {
                apply_declared_action_transform(specs[j], batch.mean_action(t), gm);
                double* dst =
                    ctx.psl_g_mean.data() + (static_cast<std::size_t>(j) * batch.size + t) * act;
                std::copy(gm.begin(), gm.end(), dst);
                ctx.psl_denominator_log[static_cast<std::size_t>(j) * batch.size + t] =
                    gaussian_log_density(gm, batch.sym_mean(j, t), sigma_old);
            }
        }
    }
    return ctx;
}

namespace {

struct SampleWork {
    MlpCache policy_cache;
    MlpCache value_cache;
    MlpCache sym_cache;
    MlpCache sym_value_cache;
    Vec mu, v_out, v_sym_out, mu_sym, mu_last, ghat, tau, dmu, dmu_sym;
};

inline double log_density_given(std::span<const double> x, std::span<const double> mu,
                                std::span<const double> sigma) {
    double lp = -0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = (x[i] - mu[i]) / sigma[i];
        lp -= std::log(sigma[i]) + 0.5 * z * z;
    }
    return lp;
}

}  // namespace

double eval_minibatch_loss(const UpdateContext& ctx, std::span<const int> indices,
                           const GaussianPolicy& policy, const ValueFunction& value,
                           PolicyGrad* pgrad, MlpGrad* vgrad) {
    const RolloutBatch& batch = *ctx.batch;
    const PpoConfig& ppo = *ctx.ppo;
    const SymLossConfig& sym = *ctx.sym;
    const int act = batch.act_dim;
    const int n_tr = batch.n_transforms;
    const double inv_m = 1.0 / static_cast<double>(indices.size());
    const Vec sigma = policy.sigma();

    Vec delta_mu_root;  // per transform: k_s * sqrt(-2 ln(1/(1+xi)))
    if (sym.method == SymMethod::asl) {
        const double xi = asl_xi(ppo.clip, act);
        const double root = std::sqrt(-2.0 * std::log(1.0 / (1.0 + xi)));
        delta_mu_root.resize(n_tr);
        for (int j = 0; j < n_tr; ++j) delta_mu_root[j] = sym.k_s[j] * root;
    }

    SampleWork w;
    double loss = 0.0;

    for (int t : indices) {
        auto s = batch.state(t);
        auto a = batch.action(t);

        // Policy and value forward on the explored state.
        mlp_forward(policy.mean_net, s, w.policy_cache, w.mu);
        mlp_forward(value.net, s, w.value_cache, w.v_out);
        const double v = w.v_out[0];

        w.dmu.assign(act, 0.0);
        double dv = 0.0;

        // PPO clipped surrogate (sign form).
        const double lp = log_density_given(a, w.mu, sigma);
        const double ratio = std::exp(lp - batch.logp_old[t]);
        if (!std::isfinite(ratio))
            throw std::runtime_error("ppo update: non-finite probability ratio, update aborted");
        const double adv = batch.advantages[t];
        const double sgn = adv > 0.0 ? 1.0 : (adv < 0.0 ? -1.0 : 0.0);
        const double bound = (1.0 + sgn * ppo.clip) * adv;
        const double unclipped = ratio * adv;
        loss -= inv_m * std::min(unclipped, bound);
        if (unclipped <= bound && pgrad) {
            const double dlp = -inv_m * ratio * adv;
            for (int i = 0; i < act; ++i) {
                const double zi = (a[i] - w.mu[i]) / sigma[i];
                w.dmu[i] += dlp * zi / sigma[i];
                pgrad->log_sigma[i] += dlp * (zi * zi - 1.0);
            }
        }

        // Value loss.
        const double verr = v - batch.value_targets[t];
        loss += inv_m * ppo.value_coef * verr * verr;
        dv += inv_m * ppo.value_coef * 2.0 * verr;

        // ASL shares mu_last(s_t) across transforms.
        if (sym.method == SymMethod::asl) mlp_forward(ctx.theta_last.params.mean_net, s, w.mu_last);

        for (int j = 0; j < n_tr && sym.method != SymMethod::none; ++j) {
            const double w_pi = sym.w_pi[j];
            const double w_v = sym.w_v[j];
            const bool gate_open =
                sym.method != SymMethod::asl || (ctx.gates && ctx.gates->open(j, t));
            if (sym.method == SymMethod::asl && !gate_open) continue;

            auto fs = batch.sym_state(j, t);

            // Policy symmetry term.
            if (sym.method == SymMethod::msl) {
                mlp_forward(policy.mean_net, fs, w.sym_cache, w.mu_sym);
                const auto& spec = (*ctx.specs)[j];
                w.dmu_sym.assign(act, 0.0);
                double term = 0.0;
                for (int i = 0; i < act; ++i) {
                    const double gi = spec.act_multipliers[i] * w.mu[spec.act_indices[i]];
                    const double e = gi - w.mu_sym[i];
                    term += e * e;
                    if (pgrad) {
                        w.dmu[spec.act_indices[i]] +=
                            w_pi * inv_m * 2.0 * e * spec.act_multipliers[i];
                        w.dmu_sym[i] -= w_pi * inv_m * 2.0 * e;
                    }
                }
                loss += w_pi * inv_m * term;
                if (pgrad) mlp_backward(policy.mean_net, w.sym_cache, w.dmu_sym, pgrad->net);
            } else if (sym.method == SymMethod::psl) {
                const std::size_t jt = static_cast<std::size_t>(j) * batch.size + t;
                const double den_log = ctx.psl_denominator_log[jt];
                if (den_log < -700.0) {
                    std::fprintf(stderr,
                                 "psl: denominator density underflow at (j=%d,t=%d), step "
                                 "skipped\n",
                                 j, t);
                    continue;
                }
                std::span<const double> gm{
                    ctx.psl_g_mean.data() + (static_cast<std::size_t>(j) * batch.size + t) * act,
                    static_cast<std::size_t>(act)};
                mlp_forward(policy.mean_net, fs, w.sym_cache, w.mu_sym);
                const double lp_theta = log_density_given(gm, w.mu_sym, sigma);
                const double num_log = std::min(lp_theta, batch.logp_old[t]);
                const double x = std::exp(num_log - den_log);
                loss += w_pi * inv_m * -std::min(x, 1.0 + ppo.clip);
                if (pgrad && x < 1.0 + ppo.clip && lp_theta <= batch.logp_old[t]) {
                    const double dlp_theta = w_pi * inv_m * -x;
                    w.dmu_sym.assign(act, 0.0);
                    for (int i = 0; i < act; ++i) {
                        const double zi = (gm[i] - w.mu_sym[i]) / sigma[i];
                        w.dmu_sym[i] = dlp_theta * zi / sigma[i];
                        pgrad->log_sigma[i] += dlp_theta * (zi * zi - 1.0);
                    }
                    mlp_backward(policy.mean_net, w.sym_cache, w.dmu_sym, pgrad->net);
                }
            } else if (sym.method == SymMethod::asl) {
                compose_global_estimator(*ctx.graph, *ctx.nu, j, w.mu_last, w.ghat);
                auto abar = batch.sym_mean(j, t);
                w.tau.resize(act);
                for (int i = 0; i < act; ++i) {
                    const double dm = delta_mu_root[j] * sigma[i];
                    w.tau[i] = std::min(std::max(w.ghat[i], abar[i] - dm), abar[i] + dm);
                }
                std::span<const double> wg{ctx.w_g.data() + static_cast<std::size_t>(j) * act,
                                           static_cast<std::size_t>(act)};
                mlp_forward(policy.mean_net, fs, w.sym_cache, w.mu_sym);
                const double expo = asl_ratio_exponent(w.tau, abar, w.mu_sym, sigma, wg);
                const double clamped =
                    std::min(std::max(expo, -kAslExponentClamp), kAslExponentClamp);
                const double r = std::exp(clamped);
                loss += w_pi * inv_m * -r;
                if (pgrad && std::abs(expo) < kAslExponentClamp) {
                    w.dmu_sym.assign(act, 0.0);
                    for (int i = 0; i < act; ++i)
                        w.dmu_sym[i] = w_pi * inv_m * -r * (w.tau[i] - w.mu_sym[i]) * wg[i] /
                                       (sigma[i] * sigma[i]);
                    mlp_backward(policy.mean_net, w.sym_cache, w.dmu_sym, pgrad->net);
                }
            }

            // Value symmetry term (ASL terms are gated, MSL/PSL are not).
            mlp_forward(value.net, fs, w.sym_value_cache, w.v_sym_out);
            const double sverr = w.v_sym_out[0] - batch.value_targets[t];
            loss += w_v * inv_m * sverr * sverr;
            if (vgrad) {
                const double dvf[1] = {w_v * inv_m * 2.0 * sverr};
                mlp_backward(value.net, w.sym_value_cache, std::span<const double>(dvf, 1),
                             *vgrad);
            }
        }

        if (pgrad) mlp_backward(policy.mean_net, w.policy_cache, w.dmu, pgrad->net);
        if (vgrad) {
            const double dvv[1] = {dv};
            mlp_backward(value.net, w.value_cache, std::span<const double>(dvv, 1), *vgrad);
        }
    }

    // Entropy bonus (state independent for a diagonal Gaussian).
    if (ppo.entropy_coef != 0.0) {
        double h = 0.5 * act * (1.0 + std::log(2.0 * std::numbers::pi));
        for (int i = 0; i < act; ++i) h += policy.log_sigma[i];
        loss -= ppo.entropy_coef * h;
        if (pgrad)
            for (int i = 0; i < act; ++i) pgrad->log_sigma[i] -= ppo.entropy_coef;
    }

    return loss;
}

UpdateStats update_epochs(const RolloutBatch& batch, GaussianPolicy& policy, ValueFunction& value,
                          AdamOptimizer& policy_opt, AdamOptimizer& value_opt,
                          const PpoConfig& ppo, const SymLossConfig& sym,
                          const std::vector<TransformSpec>& specs, const RelationGraph* graph,
                          const EstimatorParams* nu, const Vec* w_g, const GateOutputs* gates,
                          std::mt19937_64& shuffle_rng) {
    UpdateContext ctx =
        UpdateContext::prepare(batch, ppo, sym, specs, policy, graph, nu, w_g, gates);

    PolicyGrad pgrad = PolicyGrad::zeros_like(policy);
    MlpGrad vgrad = MlpGrad::zeros_like(value.net);

    std::vector<int> order(batch.size);
    std::iota(order.begin(), order.end(), 0);

    UpdateStats stats;
    for (int epoch = 0; epoch < ppo.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (int off = 0; off < batch.size; off += ppo.minibatch_size) {
            const int len = std::min(ppo.minibatch_size, batch.size - off);
            std::span<const int> mb{order.data() + off, static_cast<std::size_t>(len)};
            pgrad.reset();
            vgrad.reset();
            stats.final_loss = eval_minibatch_loss(ctx, mb, policy, value, &pgrad, &vgrad);

            ParamGroup pg;
            for (std::size_t l = 0; l < policy.mean_net.layers.size(); ++l) {
                pg.add(policy.mean_net.layers[l].w, pgrad.net.w[l]);
                pg.add(policy.mean_net.layers[l].b, pgrad.net.b[l]);
            }
            pg.add(policy.log_sigma, pgrad.log_sigma);
            policy_opt.step(pg.params, pg.grads, pg.sizes);

            ParamGroup vg;
            for (std::size_t l = 0; l < value.net.layers.size(); ++l) {
                vg.add(value.net.layers[l].w, vgrad.w[l]);
                vg.add(value.net.layers[l].b, vgrad.b[l]);
            }
            value_opt.step(vg.params, vg.grads, vg.sizes);

            ctx.theta_last = PolicySnapshot::of(policy);
            ++stats.optimizer_steps;
        }
    }
    return stats;
}

}  // namespace symrl
