#include "symrl/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "symrl/ppo.hpp"

namespace symrl {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

int iterations_for(long total_steps, int batch_steps) {
    return static_cast<int>(total_steps / batch_steps);
}

int eval_points_for(int iterations) { return iterations / kEvalEvery; }

double evaluate_policy(const Env& env, const GaussianPolicy& policy,
                       const std::vector<int>& goals, int episodes, std::uint64_t seed) {
    if (goals.empty()) throw std::invalid_argument("evaluate_policy: no goals");
    double total = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        const int goal = goals[ep % goals.size()];
        EnvState s = env.reset(goal, mix_seed(seed, ep));
        double ret = 0.0;
        while (true) {
            const Vec a = forward_mean(policy, s.obs);
            StepResult r = env.step(s, a);
            ret += r.reward;
            if (r.terminated || r.truncated) break;
            s = std::move(r.state);
        }
        total += ret;
    }
    return total / episodes;
}

TrainResult run_training(const TrainOptions& options) {
    const ExperimentConfig& cfg = options.config;
    const Scenario& scenario = options.scenario;
    std::unique_ptr<Env> env = make_env(scenario);
    const auto& specs = env->transforms();
    const int n_tr = static_cast<int>(specs.size());
    const int obs_dim = env->obs_dim();
    const int act_dim = env->act_dim();
    const int B = cfg.ppo.batch_steps;

    std::vector<int> train_goals = scenario.train_goals;
    if (train_goals.empty())
        for (int g = 0; g < env->n_goals(); ++g) train_goals.push_back(g);
    std::vector<int> eval_goals = scenario.eval_goals;
    if (eval_goals.empty())
        for (int g = 0; g < env->n_goals(); ++g) eval_goals.push_back(g);

    const RelationGraph graph = extract_relation_graph(specs);
    const SymLossConfig sym = make_sym_loss_config(cfg, specs);
    const FitConfig& fit_cfg = cfg.fit;
    const bool use_fitting = cfg.method == SymMethod::asl && cfg.fitting;

    TrainerState st;
    if (options.resume_from) {
        st = load_checkpoint(*options.resume_from, &graph, &fit_cfg);
        if (!st.has_fit && cfg.method == SymMethod::asl) {
            st.fit = FitState::init(graph, fit_cfg);
            st.has_fit = true;
        }
    } else {
        st.policy = GaussianPolicy::make(obs_dim, cfg.hidden, act_dim, mix_seed(options.seed, 1),
                                         cfg.log_sigma_init);
        st.value = ValueFunction::make(obs_dim, cfg.hidden, mix_seed(options.seed, 2));
        AdamConfig adam;
        adam.lr = cfg.ppo.learning_rate;
        adam.max_grad_norm = cfg.ppo.max_grad_norm;
        st.policy_opt = AdamOptimizer(adam);
        st.value_opt = AdamOptimizer(adam);
        st.window = RunningWindow(sym.k_t, obs_dim);
        st.rng_env = std::mt19937_64(mix_seed(options.seed, 3));
        st.rng_policy = std::mt19937_64(mix_seed(options.seed, 4));
        st.rng_shuffle = std::mt19937_64(mix_seed(options.seed, 5));
        // ASL always needs estimators; without fitting they stay at their
        // declared initialization for the whole run.
        st.has_fit = cfg.method == SymMethod::asl;
        if (st.has_fit) st.fit = FitState::init(graph, fit_cfg);
    }
    st.policy_opt.config().lr = cfg.ppo.learning_rate;
    st.policy_opt.config().max_grad_norm = cfg.ppo.max_grad_norm;
    st.value_opt.config().lr = cfg.ppo.learning_rate;
    st.value_opt.config().max_grad_norm = cfg.ppo.max_grad_norm;

    const int total_iterations = iterations_for(cfg.total_steps, B);
    const MetricsSchema schema = MetricsSchema::build(
        specs, graph, use_fitting, scenario.has_ground_truth() && use_fitting);
    Vec gt_multipliers;
    if (scenario.has_ground_truth())
        gt_multipliers = ground_truth_multipliers(scenario.ground_truth_am, graph);

    TrainResult result;
    std::ofstream metrics_stream;
    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        result.metrics_path = options.out_dir + "/metrics_seed" + std::to_string(options.seed) +
                              ".csv";
        result.checkpoint_path =
            options.out_dir + "/checkpoint_seed" + std::to_string(options.seed) + ".txt";
        metrics_stream.open(result.metrics_path,
                            options.resume_from ? std::ios::app : std::ios::trunc);
        if (!metrics_stream)
            throw std::runtime_error("cannot write metrics file: " + result.metrics_path);
        if (!options.resume_from)
            metrics_stream << "# symrl-metrics 1\n" << schema.header() << '\n';
    }

    RolloutBatch batch;
    batch.allocate(B, obs_dim, act_dim, n_tr);
    Vec w_g(static_cast<std::size_t>(n_tr) * act_dim, 1.0);
    if (use_fitting) w_g = function_weights_per_slot(graph, st.fit);

    while (st.iteration < total_iterations) {
        // ---- collect one batch ----
        for (int t = 0; t < B; ++t) {
            if (!st.env_live) {
                const int goal = train_goals[st.goal_cursor % train_goals.size()];
                ++st.goal_cursor;
                st.env_state = env->reset(goal, st.rng_env());
                st.env_live = true;
            }
            const EnvState& s = st.env_state;
            std::copy(s.obs.begin(), s.obs.end(), batch.mutable_state(t).begin());
            st.window.push(s.obs);
            SampledAction sa = sample_action(st.policy, s.obs, st.rng_policy);
            std::copy(sa.action.begin(), sa.action.end(),
                      batch.actions.begin() + static_cast<std::size_t>(t) * act_dim);
            std::copy(sa.mean.begin(), sa.mean.end(),
                      batch.mean_actions.begin() + static_cast<std::size_t>(t) * act_dim);
            batch.logp_old[t] = sa.log_prob;
            batch.values[t] = value_of(st.value, s.obs);

            StepResult r = env->step(s, sa.action);
            batch.rewards[t] = r.reward;
            batch.terminated[t] = r.terminated ? 1 : 0;
            batch.truncated[t] = r.truncated ? 1 : 0;
            batch.bootstrap_values[t] = 0.0;
            if (r.terminated) {
                st.env_live = false;
            } else if (r.truncated) {
                batch.bootstrap_values[t] = value_of(st.value, r.state.obs);
                st.env_live = false;
            } else {
                if (t == B - 1) batch.bootstrap_values[t] = value_of(st.value, r.state.obs);
                st.env_state = std::move(r.state);
            }
        }
        st.steps_done += B;

        // ---- symmetric quantities from the pre-update policy ----
        Vec fs, abar_prime;
        for (int j = 0; j < n_tr; ++j) {
            for (int t = 0; t < B; ++t) {
                apply_state_transform(specs[j], batch.state(t), fs);
                std::copy(fs.begin(), fs.end(), batch.mutable_sym_state(j, t).begin());
                abar_prime = forward_mean(st.policy, fs);
                std::copy(abar_prime.begin(), abar_prime.end(),
                          batch.mutable_sym_mean(j, t).begin());
            }
        }

        compute_gae(batch, cfg.ppo.gamma, cfg.ppo.gae_lambda);
        normalize_advantages(batch);

        GateOutputs gates = compute_gates(batch, specs, st.window, st.value, sym);

        if (use_fitting) {
            fit_round(batch, graph, fit_cfg, &gates, st.fit);
            w_g = function_weights_per_slot(graph, st.fit);
        }

        update_epochs(batch, st.policy, st.value, st.policy_opt, st.value_opt, cfg.ppo, sym,
                      specs, &graph, st.has_fit ? &st.fit.nu : nullptr, &w_g, &gates,
                      st.rng_shuffle);

        ++st.iteration;

        // ---- logging ----
        const bool sym_log = st.iteration % kSymMetricsEvery == 0;
        const bool eval_log = st.iteration % kEvalEvery == 0;
        if (sym_log || eval_log) {
            MetricsRecord rec;
            rec.time_step = st.steps_done;
            rec.iteration = st.iteration;
            if (sym_log) {
                double dist = 0.0;
                for (int j = 0; j < n_tr; ++j)
                    for (int t = 0; t < B; ++t)
                        dist += std::abs(value_of(st.value, batch.state(t)) -
                                         value_of(st.value, batch.sym_state(j, t)));
                rec.value_distance = dist / (static_cast<double>(n_tr) * B);
                for (int j = 0; j < n_tr; ++j)
                    if (specs[j].kind == TransformSpec::Kind::reflection)
                        rec.nsrr.push_back(gates.nsrr[j]);
                if (use_fitting) {
                    for (const auto& p : st.fit.nu.pair) {
                        rec.nu_pair_m.push_back(p.m);
                        rec.nu_pair_b.push_back(p.b);
                    }
                    rec.nu_single_b = st.fit.nu.single_b;
                    if (!gt_multipliers.empty()) {
                        double err = 0.0;
                        for (std::size_t p = 0; p < gt_multipliers.size(); ++p)
                            err += std::abs(st.fit.nu.pair[p].m - gt_multipliers[p]);
                        rec.target_error = err / static_cast<double>(gt_multipliers.size());
                    }
                }
            }
            if (eval_log) {
                rec.eval_return = evaluate_policy(*env, st.policy, eval_goals, kEvalEpisodes,
                                                  mix_seed(options.seed, 7000 + st.iteration));
                result.final_eval_return = *rec.eval_return;
                if (!result.checkpoint_path.empty()) save_checkpoint(result.checkpoint_path, st);
                if (options.verbose)
                    std::fprintf(stderr, "[seed %llu] iter %d steps %ld eval %.2f\n",
                                 static_cast<unsigned long long>(options.seed), st.iteration,
                                 st.steps_done, *rec.eval_return);
            }
            result.records.push_back(rec);
            if (metrics_stream) metrics_stream << schema.row(rec) << '\n' << std::flush;
        }
    }

    // Final evaluation if the schedule did not land on one.
    if (total_iterations % kEvalEvery != 0) {
        result.final_eval_return = evaluate_policy(
            *env, st.policy, eval_goals, kEvalEpisodes, mix_seed(options.seed, 9999));
    }
    if (!result.checkpoint_path.empty()) save_checkpoint(result.checkpoint_path, st);
    return result;
}

}  // namespace symrl
