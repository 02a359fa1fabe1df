#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symrl/env.hpp"

namespace symrl {

/// Machine-readable experiment scenario: a base environment, an action
/// perturbation and the train/eval goal subsets.
struct Scenario {
    std::string name;
    std::string env_name;  // triangle | crawler
    PerturbationConfig perturb;
    std::vector<int> train_goals;
    std::vector<int> eval_goals;
    std::optional<std::string> transform_file;  // overrides the built-in set
    Vec ground_truth_am;                        // empty when the truth is unknown

    bool has_ground_truth() const { return !ground_truth_am.empty(); }
};

/// Key-value text file, one `key = value` per line, '#' comments.
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& s);

/// Builds the environment named by the scenario, wrapped in the perturbation
/// injector (an identity injector when no perturbation is declared).
std::unique_ptr<Env> make_env(const Scenario& s);

}  // namespace symrl
