#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "symrl/losses.hpp"
#include "symrl/mlp.hpp"
#include "symrl/policy.hpp"
#include "symrl/relation_graph.hpp"
#include "symrl/rollout.hpp"

namespace symrl {

struct PpoConfig {
    double clip = 0.4;
    double gamma = 0.99;
    double gae_lambda = 0.9;
    int epochs = 20;
    int minibatch_size = 64;
    double entropy_coef = 0.0;
    double value_coef = 0.5;
    double learning_rate = 3e-5;
    int batch_steps = 4096;
    double max_grad_norm = 0.5;
};

/// Clipped surrogate in the sign form: min(r*A, (1 + sgn(A)*eps)*A).
/// sgn(0) is 0.
double clipped_surrogate(double ratio, double advantage, double eps);

/// Everything the loss of one update needs besides the live parameters.
/// theta_last is refreshed by the update loop after every mini-batch.
struct UpdateContext {
    const RolloutBatch* batch = nullptr;
    const PpoConfig* ppo = nullptr;
    const SymLossConfig* sym = nullptr;
    const std::vector<TransformSpec>* specs = nullptr;

    // PSL: log densities under theta_old, precomputed once per update.
    Vec psl_denominator_log;  // n_transforms x size: log pi_old(g_j(a_bar)|f_j(s))
    Vec psl_g_mean;           // n_transforms x size x act_dim: g_j(a_bar_t)

    // ASL
    const RelationGraph* graph = nullptr;
    const EstimatorParams* nu = nullptr;  // frozen during the update
    Vec w_g;                              // n_transforms x act_dim function weights
    const GateOutputs* gates = nullptr;
    PolicySnapshot theta_last;

    static UpdateContext prepare(const RolloutBatch& batch, const PpoConfig& ppo,
                                 const SymLossConfig& sym, const std::vector<TransformSpec>& specs,
                                 const GaussianPolicy& policy, const RelationGraph* graph,
                                 const EstimatorParams* nu, const Vec* w_g,
                                 const GateOutputs* gates);
};

/// Evaluates the minimized total loss (negated PPO objective plus symmetry
/// terms) over the given sample indices, accumulating analytical gradients
/// when grad pointers are non-null. Pure in (policy, value) given the context.
double eval_minibatch_loss(const UpdateContext& ctx, std::span<const int> indices,
                           const GaussianPolicy& policy, const ValueFunction& value,
                           PolicyGrad* pgrad, MlpGrad* vgrad);

struct UpdateStats {
    int optimizer_steps = 0;
    double final_loss = 0.0;
};

/// Runs `epochs` shuffled passes of mini-batch Adam steps over the batch.
/// Policy and value use separate optimizers; theta_last is refreshed after
/// every mini-batch. Throws abort-update on NaN gradients, leaving parameters
/// at the last valid state.
UpdateStats update_epochs(const RolloutBatch& batch, GaussianPolicy& policy, ValueFunction& value,
                          AdamOptimizer& policy_opt, AdamOptimizer& value_opt,
                          const PpoConfig& ppo, const SymLossConfig& sym,
                          const std::vector<TransformSpec>& specs, const RelationGraph* graph,
                          const EstimatorParams* nu, const Vec* w_g, const GateOutputs* gates,
                          std::mt19937_64& shuffle_rng);

}  // namespace symrl
