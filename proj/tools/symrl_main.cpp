#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "symrl/checkpoint.hpp"
#include "symrl/metrics.hpp"
#include "symrl/trainer.hpp"

namespace fs = std::filesystem;
using namespace symrl;

namespace {

bool glob_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    fs::path pat(pattern);
    fs::path dir = pat.parent_path();
    if (dir.empty()) dir = ".";
    const std::string leaf = pat.filename().string();
    std::vector<std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (glob_match(leaf, entry.path().filename().string()))
            out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_aggregate(const std::string& pattern, const std::string& out_path) {
    const auto files = expand_glob(pattern);
    if (files.empty()) {
        std::fprintf(stderr, "aggregate: no files match '%s'\n", pattern.c_str());
        return 1;
    }
    std::vector<CsvTable> tables;
    for (const auto& f : files) tables.push_back(read_csv(f));
    const auto& cols = tables.front().columns;
    for (const auto& t : tables)
        if (t.columns != cols) {
            std::fprintf(stderr, "aggregate: csv schemas differ\n");
            return 1;
        }
    // Align rows on time_step and average every other numeric column.
    std::map<double, std::pair<Vec, Vec>> acc;  // time_step -> (sums, counts)
    for (const auto& t : tables) {
        for (const auto& row : t.rows) {
            auto& [sums, counts] = acc[row[0]];
            if (sums.empty()) {
                sums.assign(cols.size(), 0.0);
                counts.assign(cols.size(), 0.0);
            }
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (std::isnan(row[c])) continue;
                sums[c] += row[c];
                counts[c] += 1.0;
            }
        }
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
        std::fprintf(stderr, "aggregate: cannot write %s\n", out_path.c_str());
        return 1;
    }
    out << "# symrl-metrics 1 aggregated_over=" << files.size() << "\n";
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    out.precision(12);
    for (const auto& [ts, sc] : acc) {
        const auto& [sums, counts] = sc;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out << ',';
            if (counts[c] > 0.0) out << sums[c] / counts[c];
        }
        out << '\n';
    }
    std::printf("aggregated %zu files -> %s\n", files.size(), out_path.c_str());
    return 0;
}

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
    constexpr int W = 720, H = 420, ML = 70, MR = 20, MT = 40, MB = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) return;  // nothing to plot
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double yspan = ymax - ymin;
    ymin -= 0.05 * yspan;
    ymax += 0.05 * yspan;
    auto X = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto Y = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};
    std::ofstream out(path, std::ios::trunc);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    out << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    out << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + k * (xmax - xmin) / 4.0;
        const double yv = ymin + k * (ymax - ymin) / 4.0;
        out << "<text x='" << X(xv) << "' y='" << H - MB + 18
            << "' text-anchor='middle' font-size='11'>" << xv << "</text>\n";
        out << "<text x='" << ML - 8 << "' y='" << Y(yv) + 4
            << "' text-anchor='end' font-size='11'>" << yv << "</text>\n";
    }
    int ci = 0;
    int ly = MT;
    for (const auto& [name, pts] : series) {
        const char* color = colors[ci % 12];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : pts) out << X(x) << ',' << Y(y) << ' ';
        out << "'/>\n";
        out << "<text x='" << W - MR - 150 << "' y='" << ly + 12 << "' font-size='11' fill='"
            << color << "'>" << name << "</text>\n";
        ly += 14;
        ++ci;
    }
    out << "</svg>\n";
}

int cmd_plot(const std::string& csv_path, const std::string& out_dir) {
    const CsvTable t = read_csv(csv_path);
    fs::create_directories(out_dir);
    const int ts = t.column("time_step");
    if (ts < 0) {
        std::fprintf(stderr, "plot: csv has no time_step column\n");
        return 1;
    }
    auto series_for = [&](const std::string& col) {
        std::vector<std::pair<double, double>> pts;
        const int c = t.column(col);
        if (c < 0) return pts;
        for (const auto& row : t.rows)
            if (!std::isnan(row[c])) pts.push_back({row[ts], row[c]});
        return pts;
    };
    auto group = [&](const std::string& prefix) {
        std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> out;
        for (const auto& col : t.columns)
            if (col.rfind(prefix, 0) == 0) {
                auto pts = series_for(col);
                if (!pts.empty()) out.push_back({col, std::move(pts)});
            }
        return out;
    };

    if (auto pts = series_for("eval_return"); !pts.empty())
        write_svg_lines(out_dir + "/return.svg", "Average episode return",
                        {{"eval_return", pts}});
    if (auto pts = series_for("value_distance"); !pts.empty())
        write_svg_lines(out_dir + "/value_distance.svg", "Average value distance",
                        {{"value_distance", pts}});
    if (auto g = group("nsrr_"); !g.empty())
        write_svg_lines(out_dir + "/nsrr.svg", "Neutral state rejection ratio", g);
    if (auto g = group("nu_m_"); !g.empty())
        write_svg_lines(out_dir + "/targets.svg", "Symmetry transformation targets (m)", g);
    if (auto pts = series_for("target_error"); !pts.empty())
        write_svg_lines(out_dir + "/target_error.svg", "Mean multiplier error vs ground truth",
                        {{"target_error", pts}});
    std::printf("plots written to %s\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symrl: symmetry-aware PPO training harness"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "run one training process");
    std::string config_path, out_dir = "runs/out", resume;
    std::uint64_t seed = 0;
    bool desk = false, verbose = false;
    train->add_option("--config", config_path, "experiment config file")->required();
    train->add_option("--seed", seed, "experiment seed");
    train->add_option("--out", out_dir, "output directory");
    train->add_option("--resume", resume, "checkpoint to resume from");
    train->add_flag("--desk", desk, "desk-scale defaults (hidden 64x64, 200k steps)");
    train->add_flag("--verbose", verbose, "progress on stderr");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    std::string ckpt_path, scenario_path;
    int episodes = kEvalEpisodes;
    std::uint64_t eval_seed = 0;
    eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
    eval->add_option("--scenario", scenario_path, "scenario file")->required();
    eval->add_option("--episodes", episodes, "episodes to run");
    eval->add_option("--seed", eval_seed, "evaluation seed");

    auto* agg = app.add_subcommand("aggregate", "average metrics CSVs over seeds");
    std::string glob_pattern, agg_out = "aggregate.csv";
    agg->add_option("--glob", glob_pattern, "file pattern, e.g. runs/*/metrics_seed*.csv")
        ->required();
    agg->add_option("--out", agg_out, "output CSV");

    auto* plot = app.add_subcommand("plot", "emit SVG charts from a metrics CSV");
    std::string plot_csv, plot_out = "plots";
    plot->add_option("--csv", plot_csv, "metrics CSV")->required();
    plot->add_option("--out", plot_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            TrainOptions opt;
            opt.config = parse_experiment_config(config_path, desk);
            opt.scenario = load_scenario(opt.config.scenario_path);
            opt.seed = seed;
            opt.out_dir = out_dir;
            opt.verbose = verbose;
            if (!resume.empty()) opt.resume_from = resume;
            TrainResult res = run_training(opt);
            std::printf("final eval return: %.4f\n", res.final_eval_return);
            std::printf("metrics: %s\n", res.metrics_path.c_str());
            std::printf("checkpoint: %s\n", res.checkpoint_path.c_str());
        } else if (*eval) {
            Scenario sc = load_scenario(scenario_path);
            auto env = make_env(sc);
            TrainerState st = load_checkpoint(ckpt_path, nullptr, nullptr);
            std::vector<int> goals = sc.eval_goals;
            if (goals.empty())
                for (int g = 0; g < env->n_goals(); ++g) goals.push_back(g);
            const double ret = evaluate_policy(*env, st.policy, goals, episodes, eval_seed);
            std::printf("mean return over %d episodes: %.4f\n", episodes, ret);
        } else if (*agg) {
            return cmd_aggregate(glob_pattern, agg_out);
        } else if (*plot) {
            return cmd_plot(plot_csv, plot_out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
