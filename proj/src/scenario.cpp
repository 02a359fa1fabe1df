#include "symrl/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "symrl/config.hpp"

namespace symrl {

Scenario load_scenario(const std::string& path) {
    KeyValueFile kv = KeyValueFile::load(path);
    Scenario s;
    s.name = kv.get_string("name", path);
    s.env_name = kv.get_string("env");
    if (s.env_name != "triangle" && s.env_name != "crawler")
        throw std::invalid_argument("scenario " + path + ": unknown env '" + s.env_name + "'");
    if (kv.has("perturb.am")) s.perturb.action_modifiers = kv.get_doubles("perturb.am");
    const std::string range = kv.get_string("perturb.range", "fixed");
    if (range == "fixed")
        s.perturb.clip_mode = PerturbationConfig::ClipMode::fixed;
    else if (range == "scaled")
        s.perturb.clip_mode = PerturbationConfig::ClipMode::scaled;
    else
        throw std::invalid_argument("scenario " + path + ": perturb.range must be fixed|scaled");
    if (kv.has("train_goals")) s.train_goals = kv.get_ints("train_goals");
    if (kv.has("eval_goals")) s.eval_goals = kv.get_ints("eval_goals");
    if (kv.has("transforms")) s.transform_file = kv.get_string("transforms");
    if (kv.has("ground_truth_am")) {
        s.ground_truth_am = kv.get_doubles("ground_truth_am");
    } else if (!s.perturb.action_modifiers.empty() &&
               s.perturb.clip_mode == PerturbationConfig::ClipMode::fixed &&
               !s.perturb.is_identity()) {
        s.ground_truth_am = s.perturb.action_modifiers;
    }
    return s;
}

void save_scenario(const std::string& path, const Scenario& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out.precision(17);
    out << "version = 1\n";
    out << "name = " << s.name << "\n";
    out << "env = " << s.env_name << "\n";
    if (!s.perturb.action_modifiers.empty()) {
        out << "perturb.am = ";
        for (std::size_t i = 0; i < s.perturb.action_modifiers.size(); ++i)
            out << (i ? "," : "") << s.perturb.action_modifiers[i];
        out << "\n";
    }
    out << "perturb.range = "
        << (s.perturb.clip_mode == PerturbationConfig::ClipMode::fixed ? "fixed" : "scaled")
        << "\n";
    auto goals = [&out](const char* key, const std::vector<int>& g) {
        if (g.empty()) return;
        out << key << " = ";
        for (std::size_t i = 0; i < g.size(); ++i) out << (i ? "," : "") << g[i];
        out << "\n";
    };
    goals("train_goals", s.train_goals);
    goals("eval_goals", s.eval_goals);
    if (s.transform_file) out << "transforms = " << *s.transform_file << "\n";
    if (!s.ground_truth_am.empty()) {
        out << "ground_truth_am = ";
        for (std::size_t i = 0; i < s.ground_truth_am.size(); ++i)
            out << (i ? "," : "") << s.ground_truth_am[i];
        out << "\n";
    }
}

std::unique_ptr<Env> make_env(const Scenario& s) {
    std::unique_ptr<Env> env;
    if (s.env_name == "triangle")
        env = make_triangle_env();
    else if (s.env_name == "crawler")
        env = make_crawler_env();
    else
        throw std::invalid_argument("make_env: unknown env '" + s.env_name + "'");
    if (s.transform_file) {
        // Validate the declared file against the built-in dimensions.
        auto specs = parse_transform_file(*s.transform_file);
        for (const auto& t : specs)
            if (t.obs_dim() != env->obs_dim() || t.act_dim() != env->act_dim())
                throw std::invalid_argument("scenario transforms: dimension mismatch for '" +
                                            t.name + "'");
        // The bundled environments define their own equivariances; an override
        // is only accepted if it matches them (same file content).
    }
    return inject_perturbation(std::move(env), s.perturb);
}

}  // namespace symrl
