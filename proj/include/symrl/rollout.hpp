#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symrl/numerics.hpp"

namespace symrl {

/// One batch of experience plus the symmetric quantities every loss consumes.
/// All per-step arrays share the same length; sym_states/sym_means hold the
/// transformed states f_j(s_t) and snapshot means a'_{j,t} per transform.
struct RolloutBatch {
    int size = 0;
    int obs_dim = 0;
    int act_dim = 0;
    int n_transforms = 0;

    Vec states;        // size x obs_dim
    Vec actions;       // size x act_dim
    Vec mean_actions;  // size x act_dim (a_bar_t, from theta_old)
    Vec logp_old;      // size
    Vec rewards;       // size
    Vec values;        // size (V_omega_old(s_t))
    std::vector<std::uint8_t> terminated;  // size
    std::vector<std::uint8_t> truncated;   // size
    Vec bootstrap_values;                  // size; value of the successor state
                                           // when a segment is cut without termination
    Vec sym_states;  // n_transforms x size x obs_dim
    Vec sym_means;   // n_transforms x size x act_dim
    Vec advantages;     // size
    Vec value_targets;  // size

    void allocate(int steps, int obs, int act, int transforms);

    std::span<const double> state(int t) const { return {states.data() + static_cast<std::size_t>(t) * obs_dim, static_cast<std::size_t>(obs_dim)}; }
    std::span<const double> action(int t) const { return {actions.data() + static_cast<std::size_t>(t) * act_dim, static_cast<std::size_t>(act_dim)}; }
    std::span<const double> mean_action(int t) const { return {mean_actions.data() + static_cast<std::size_t>(t) * act_dim, static_cast<std::size_t>(act_dim)}; }
    std::span<const double> sym_state(int j, int t) const {
        return {sym_states.data() + (static_cast<std::size_t>(j) * size + t) * obs_dim, static_cast<std::size_t>(obs_dim)};
    }
    std::span<const double> sym_mean(int j, int t) const {
        return {sym_means.data() + (static_cast<std::size_t>(j) * size + t) * act_dim, static_cast<std::size_t>(act_dim)};
    }
    std::span<double> mutable_state(int t) { return {states.data() + static_cast<std::size_t>(t) * obs_dim, static_cast<std::size_t>(obs_dim)}; }
    std::span<double> mutable_sym_state(int j, int t) {
        return {sym_states.data() + (static_cast<std::size_t>(j) * size + t) * obs_dim, static_cast<std::size_t>(obs_dim)};
    }
    std::span<double> mutable_sym_mean(int j, int t) {
        return {sym_means.data() + (static_cast<std::size_t>(j) * size + t) * act_dim, static_cast<std::size_t>(act_dim)};
    }
};

/// Generalized advantage estimation over possibly multi-episode arrays.
/// terminated cuts a segment with no bootstrap; truncated (or running past the
/// final step) bootstraps with the supplied successor value. Value targets are
/// advantages + values.
void compute_gae(std::span<const double> rewards, std::span<const double> values,
                 std::span<const std::uint8_t> terminated, std::span<const std::uint8_t> truncated,
                 std::span<const double> bootstrap_values, double gamma, double lambda,
                 Vec& advantages, Vec& value_targets);

void compute_gae(RolloutBatch& batch, double gamma, double lambda);

/// Z-score normalization in place (population std, eps-guarded). A zero-variance
/// batch becomes all zeros.
void normalize_advantages(RolloutBatch& batch);

}  // namespace symrl
