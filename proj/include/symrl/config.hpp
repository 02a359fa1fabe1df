#pragma once

#include <map>
#include <string>
#include <vector>

#include "symrl/fitting.hpp"
#include "symrl/losses.hpp"
#include "symrl/ppo.hpp"

namespace symrl {

/// Flat key-value configuration file: `key = value` per line, '#' comments,
/// dotted section prefixes (ppo., sym., fit.).
class KeyValueFile {
public:
    static KeyValueFile load(const std::string& path);
    explicit KeyValueFile(std::map<std::string, std::string> entries)
        : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<int> get_ints(const std::string& key) const;

private:
    std::map<std::string, std::string> entries_;
};

struct ExperimentConfig {
    std::string scenario_path;
    SymMethod method = SymMethod::none;
    long total_steps = 4'000'000;
    std::vector<int> hidden = {256, 256};
    double log_sigma_init = -1.0;
    PpoConfig ppo;

    // Scalar symmetry knobs, expanded per transform at setup.
    double w_pi = 0.05;
    double w_v = 0.5;
    double k_s = 0.3;
    double k_d_reflection = 0.1;
    double k_d_rotation = 0.0;
    double k_v = 1.5;
    bool value_gate = true;
    std::size_t k_t = 0;  // 0 means 10 x batch steps

    bool fitting = false;
    FitConfig fit;
};

/// Parses a config file. With desk = true, desk-scale defaults (hidden
/// [64,64], 200k total steps) are installed before the file's own keys apply.
ExperimentConfig parse_experiment_config(const std::string& path, bool desk);

SymMethod parse_method(const std::string& name);
const char* method_name(SymMethod m);

/// Per-transform loss configuration from the scalar knobs.
SymLossConfig make_sym_loss_config(const ExperimentConfig& cfg,
                                   const std::vector<TransformSpec>& specs);

}  // namespace symrl
