#include "symrl/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace symrl {

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
        entries[key] = value;
    }
    return KeyValueFile(std::move(entries));
}

std::string KeyValueFile::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument("missing config key: " + key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : std::stod(it->second);
}

long KeyValueFile::get_long(const std::string& key, long fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : std::stol(it->second);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config key " + key + ": expected true/false");
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<int> KeyValueFile::get_ints(const std::string& key) const {
    std::vector<int> out;
    std::stringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

SymMethod parse_method(const std::string& name) {
    if (name == "none" || name == "ppo") return SymMethod::none;
    if (name == "msl") return SymMethod::msl;
    if (name == "psl") return SymMethod::psl;
    if (name == "asl") return SymMethod::asl;
    throw std::invalid_argument("unknown method '" + name + "' (none|msl|psl|asl)");
}

const char* method_name(SymMethod m) {
    switch (m) {
        case SymMethod::none: return "none";
        case SymMethod::msl: return "msl";
        case SymMethod::psl: return "psl";
        case SymMethod::asl: return "asl";
    }
    return "none";
}

ExperimentConfig parse_experiment_config(const std::string& path, bool desk) {
    KeyValueFile kv = KeyValueFile::load(path);
    ExperimentConfig cfg;
    if (desk) {
        cfg.hidden = {64, 64};
        cfg.total_steps = 200'000;
    }
    cfg.scenario_path = kv.get_string("scenario");
    cfg.method = parse_method(kv.get_string("method", "none"));
    cfg.total_steps = kv.get_long("total_steps", cfg.total_steps);
    if (kv.has("hidden")) {
        cfg.hidden.clear();
        for (int h : kv.get_ints("hidden")) cfg.hidden.push_back(h);
    }
    cfg.log_sigma_init = kv.get_double("log_sigma_init", cfg.log_sigma_init);

    cfg.ppo.batch_steps = static_cast<int>(kv.get_long("ppo.batch_steps", cfg.ppo.batch_steps));
    cfg.ppo.clip = kv.get_double("ppo.clip", cfg.ppo.clip);
    cfg.ppo.gamma = kv.get_double("ppo.gamma", cfg.ppo.gamma);
    cfg.ppo.gae_lambda = kv.get_double("ppo.gae_lambda", cfg.ppo.gae_lambda);
    cfg.ppo.epochs = static_cast<int>(kv.get_long("ppo.epochs", cfg.ppo.epochs));
    cfg.ppo.minibatch_size =
        static_cast<int>(kv.get_long("ppo.minibatch_size", cfg.ppo.minibatch_size));
    cfg.ppo.entropy_coef = kv.get_double("ppo.entropy_coef", cfg.ppo.entropy_coef);
    cfg.ppo.value_coef = kv.get_double("ppo.value_coef", cfg.ppo.value_coef);
    cfg.ppo.learning_rate = kv.get_double("ppo.learning_rate", cfg.ppo.learning_rate);
    cfg.ppo.max_grad_norm = kv.get_double("ppo.max_grad_norm", cfg.ppo.max_grad_norm);

    cfg.w_pi = kv.get_double("sym.w_pi", cfg.w_pi);
    cfg.w_v = kv.get_double("sym.w_v", cfg.w_v);
    cfg.k_s = kv.get_double("sym.k_s", cfg.k_s);
    cfg.k_d_reflection = kv.get_double("sym.k_d_reflection", cfg.k_d_reflection);
    cfg.k_d_rotation = kv.get_double("sym.k_d_rotation", cfg.k_d_rotation);
    cfg.k_v = kv.get_double("sym.k_v", cfg.k_v);
    cfg.value_gate = kv.get_bool("sym.value_gate", cfg.value_gate);
    cfg.k_t = static_cast<std::size_t>(kv.get_long("sym.k_t", 0));

    cfg.fitting = kv.get_bool("fit.enabled", cfg.fitting);
    const std::string form = kv.get_string("fit.form", "mxb");
    if (form == "mxb")
        cfg.fit.form = FitConfig::Form::mx_plus_b;
    else if (form == "mx")
        cfg.fit.form = FitConfig::Form::mx;
    else if (form == "b")
        cfg.fit.form = FitConfig::Form::b_only;
    else
        throw std::invalid_argument("fit.form must be mxb|mx|b");
    cfg.fit.k_i = static_cast<int>(kv.get_long("fit.k_i", cfg.fit.k_i));
    cfg.fit.min_dataset = static_cast<std::size_t>(
        kv.get_long("fit.min_dataset", static_cast<long>(cfg.fit.min_dataset)));
    cfg.fit.hu_max = kv.get_double("fit.hu_max", cfg.fit.hu_max);
    cfg.fit.hu_scale = kv.get_double("fit.hu_scale", cfg.fit.hu_scale);
    cfg.fit.hg_base = kv.get_double("fit.hg_base", cfg.fit.hg_base);

    if (cfg.total_steps % cfg.ppo.batch_steps != 0)
        throw std::invalid_argument("total_steps must be a multiple of ppo.batch_steps");
    if (!(cfg.ppo.clip > 0.0) || !(cfg.ppo.gamma > 0.0 && cfg.ppo.gamma <= 1.0) ||
        !(cfg.ppo.gae_lambda >= 0.0 && cfg.ppo.gae_lambda <= 1.0))
        throw std::invalid_argument("invalid PPO configuration");
    if (cfg.method == SymMethod::asl && !(cfg.k_v > 1.0) && cfg.value_gate)
        throw std::invalid_argument("sym.k_v must exceed 1 when the value gate is enabled");
    return cfg;
}

SymLossConfig make_sym_loss_config(const ExperimentConfig& cfg,
                                   const std::vector<TransformSpec>& specs) {
    SymLossConfig sym;
    sym.method = cfg.method;
    const std::size_t n = specs.size();
    sym.w_pi.assign(n, cfg.w_pi);
    sym.w_v.assign(n, cfg.w_v);
    sym.k_s.assign(n, cfg.k_s);
    sym.k_d.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        sym.k_d[j] = specs[j].kind == TransformSpec::Kind::reflection ? cfg.k_d_reflection
                                                                      : cfg.k_d_rotation;
    sym.k_v = cfg.k_v;
    sym.value_gate_enabled = cfg.value_gate;
    sym.k_t = cfg.k_t != 0 ? cfg.k_t : static_cast<std::size_t>(10) * cfg.ppo.batch_steps;
    sym.fitting_enabled = cfg.fitting;
    return sym;
}

}  // namespace symrl
