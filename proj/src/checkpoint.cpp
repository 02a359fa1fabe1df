#include "symrl/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace symrl {

namespace {

void write_vec(std::ostream& out, const Vec& v) {
    out << v.size();
    for (double x : v) out << ' ' << x;
    out << '\n';
}

Vec read_vec(std::istream& in) {
    std::size_t n;
    if (!(in >> n)) throw std::runtime_error("checkpoint: truncated vector");
    Vec v(n);
    for (auto& x : v)
        if (!(in >> x)) throw std::runtime_error("checkpoint: truncated vector data");
    return v;
}

void expect(std::istream& in, const char* token) {
    std::string got;
    if (!(in >> got) || got != token)
        throw std::runtime_error(std::string("checkpoint: expected '") + token + "', got '" + got +
                                 "'");
}

void write_adam(std::ostream& out, const AdamOptimizer& opt) {
    out << "adam " << opt.t_ << '\n';
    write_vec(out, opt.m_);
    write_vec(out, opt.v_);
}

AdamOptimizer read_adam(std::istream& in, const AdamConfig& cfg) {
    expect(in, "adam");
    AdamOptimizer opt(cfg);
    if (!(in >> opt.t_)) throw std::runtime_error("checkpoint: bad adam state");
    opt.m_ = read_vec(in);
    opt.v_ = read_vec(in);
    return opt;
}

void write_history(std::ostream& out, const TargetHistory& h) { write_vec(out, h.values()); }

TargetHistory read_history(std::istream& in, int capacity) {
    TargetHistory h(capacity);
    for (double v : read_vec(in)) h.push(v);
    return h;
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net) {
    out << "mlp " << net.layers.size() << '\n';
    for (const auto& l : net.layers) {
        out << "layer " << l.in << ' ' << l.out << '\n';
        write_vec(out, l.w);
        write_vec(out, l.b);
    }
}

Mlp read_mlp(std::istream& in) {
    expect(in, "mlp");
    std::size_t n;
    if (!(in >> n)) throw std::runtime_error("checkpoint: bad mlp header");
    Mlp net;
    for (std::size_t i = 0; i < n; ++i) {
        expect(in, "layer");
        Mlp::Layer l;
        if (!(in >> l.in >> l.out)) throw std::runtime_error("checkpoint: bad layer header");
        l.w = read_vec(in);
        l.b = read_vec(in);
        if (l.w.size() != static_cast<std::size_t>(l.in) * l.out ||
            l.b.size() != static_cast<std::size_t>(l.out))
            throw std::runtime_error("checkpoint: layer shape mismatch");
        net.layers.push_back(std::move(l));
    }
    return net;
}

void save_checkpoint(const std::string& path, const TrainerState& state) {
    std::ostringstream out;
    out.precision(17);
    out << "symrl-checkpoint 1\n";
    out << "steps " << state.steps_done << ' ' << state.iteration << ' ' << state.goal_cursor
        << '\n';
    write_mlp(out, state.policy.mean_net);
    out << "log_sigma ";
    write_vec(out, state.policy.log_sigma);
    write_mlp(out, state.value.net);
    write_adam(out, state.policy_opt);
    write_adam(out, state.value_opt);
    out << "rng " << state.rng_env << ' ' << state.rng_policy << ' ' << state.rng_shuffle << '\n';
    out << "window\n";
    state.window.serialize(out);
    out << "fit " << (state.has_fit ? 1 : 0) << '\n';
    if (state.has_fit) {
        out << state.fit.nu.pair.size() << ' ' << state.fit.nu.single_b.size() << '\n';
        for (const auto& p : state.fit.nu.pair) out << p.m << ' ' << p.b << '\n';
        write_vec(out, state.fit.nu.single_b);
        for (const auto& h : state.fit.pair_m_hist) write_history(out, h);
        for (const auto& h : state.fit.pair_b_hist) write_history(out, h);
        for (const auto& h : state.fit.single_b_hist) write_history(out, h);
    }
    out << "env " << (state.env_live ? 1 : 0) << ' ' << state.env_state.step << '\n';
    write_vec(out, state.env_state.obs);
    write_vec(out, state.env_state.hidden);

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f << out.str();
}

TrainerState load_checkpoint(const std::string& path, const RelationGraph* graph,
                             const FitConfig* fit_cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string magic;
    int version;
    in >> magic >> version;
    if (magic != "symrl-checkpoint" || version != 1)
        throw std::runtime_error("unsupported checkpoint format in " + path);
    TrainerState st;
    expect(in, "steps");
    in >> st.steps_done >> st.iteration >> st.goal_cursor;
    st.policy.mean_net = read_mlp(in);
    expect(in, "log_sigma");
    st.policy.log_sigma = read_vec(in);
    st.value.net = read_mlp(in);
    st.policy_opt = read_adam(in, AdamConfig{});
    st.value_opt = read_adam(in, AdamConfig{});
    expect(in, "rng");
    in >> st.rng_env >> st.rng_policy >> st.rng_shuffle;
    expect(in, "window");
    st.window = RunningWindow::deserialize(in);
    expect(in, "fit");
    int has_fit;
    in >> has_fit;
    st.has_fit = has_fit != 0;
    if (st.has_fit) {
        std::size_t np, ns;
        in >> np >> ns;
        if (graph && fit_cfg) {
            if (np != graph->pairs.size() || ns != graph->singles.size())
                throw std::runtime_error("checkpoint fitting state does not match the graph");
            st.fit = FitState::init(*graph, *fit_cfg);
            for (auto& p : st.fit.nu.pair) in >> p.m >> p.b;
            st.fit.nu.single_b = read_vec(in);
            for (auto& h : st.fit.pair_m_hist) h = read_history(in, fit_cfg->k_i);
            for (auto& h : st.fit.pair_b_hist) h = read_history(in, fit_cfg->k_i);
            for (auto& h : st.fit.single_b_hist) h = read_history(in, fit_cfg->k_i);
        } else {
            // Caller only needs the networks; parse past the fitting block.
            double m, b;
            for (std::size_t i = 0; i < np; ++i) in >> m >> b;
            read_vec(in);
            for (std::size_t i = 0; i < 2 * np + ns; ++i) read_vec(in);
            st.has_fit = false;
        }
    }
    expect(in, "env");
    int live;
    in >> live >> st.env_state.step;
    st.env_live = live != 0;
    st.env_state.obs = read_vec(in);
    st.env_state.hidden = read_vec(in);
    if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
    return st;
}

}  // namespace symrl
