#include "symrl/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace symrl {

MetricsSchema MetricsSchema::build(const std::vector<TransformSpec>& specs,
                                   const RelationGraph& graph, bool with_fitting,
                                   bool with_ground_truth) {
    MetricsSchema s;
    for (const auto& t : specs)
        if (t.kind == TransformSpec::Kind::reflection) s.reflection_names.push_back(t.name);
    for (const auto& p : graph.pairs)
        s.pair_names.push_back(std::to_string(p.lo) + "_" + std::to_string(p.hi));
    for (const auto& sg : graph.singles) s.single_names.push_back(std::to_string(sg.slot));
    s.with_fitting = with_fitting;
    s.with_ground_truth = with_ground_truth && with_fitting;
    return s;
}

std::string MetricsSchema::header() const {
    std::ostringstream out;
    out << "time_step,iteration,eval_return,value_distance";
    for (const auto& n : reflection_names) out << ",nsrr_" << n;
    if (with_fitting) {
        for (const auto& n : pair_names) out << ",nu_m_" << n;
        for (const auto& n : pair_names) out << ",nu_b_" << n;
        for (const auto& n : single_names) out << ",nu_b_single_" << n;
        if (with_ground_truth) out << ",target_error";
    }
    return out.str();
}

std::string MetricsSchema::row(const MetricsRecord& r) const {
    std::ostringstream out;
    out.precision(12);
    out << r.time_step << ',' << r.iteration << ',';
    if (r.eval_return) out << *r.eval_return;
    out << ',';
    if (r.value_distance) out << *r.value_distance;
    for (std::size_t i = 0; i < reflection_names.size(); ++i) {
        out << ',';
        if (i < r.nsrr.size()) out << r.nsrr[i];
    }
    if (with_fitting) {
        for (std::size_t i = 0; i < pair_names.size(); ++i) {
            out << ',';
            if (i < r.nu_pair_m.size()) out << r.nu_pair_m[i];
        }
        for (std::size_t i = 0; i < pair_names.size(); ++i) {
            out << ',';
            if (i < r.nu_pair_b.size()) out << r.nu_pair_b[i];
        }
        for (std::size_t i = 0; i < single_names.size(); ++i) {
            out << ',';
            if (i < r.nu_single_b.size()) out << r.nu_single_b[i];
        }
        if (with_ground_truth) {
            out << ',';
            if (r.target_error) out << *r.target_error;
        }
    }
    return out.str();
}

void export_metrics(const std::string& path, const MetricsSchema& schema,
                    const std::vector<MetricsRecord>& records) {
    if (records.empty()) throw std::invalid_argument("export_metrics: no records");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write metrics file: " + path);
    out << "# symrl-metrics 1\n" << schema.header() << '\n';
    for (const auto& r : records) out << schema.row(r) << '\n';
    if (!out) throw std::runtime_error("error while writing metrics file: " + path);
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv: " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            have_header = true;
            continue;
        }
        Vec row;
        while (std::getline(ss, cell, ',')) {
            row.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : std::stod(cell));
        }
        row.resize(t.columns.size(), std::numeric_limits<double>::quiet_NaN());
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::runtime_error("csv has no header: " + path);
    return t;
}

}  // namespace symrl
