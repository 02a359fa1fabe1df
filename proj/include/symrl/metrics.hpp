#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symrl/numerics.hpp"
#include "symrl/relation_graph.hpp"
#include "symrl/transforms.hpp"

namespace symrl {

/// One logging event. Optional fields stay empty in the CSV when absent.
struct MetricsRecord {
    long time_step = 0;
    int iteration = 0;
    std::optional<double> eval_return;
    std::optional<double> value_distance;
    Vec nsrr;  // one entry per reflection transform
    Vec nu_pair_m, nu_pair_b, nu_single_b;
    std::optional<double> target_error;
};

/// CSV schema for one run: column names derived from the transform set and
/// relation graph, with fitted-estimator columns only when fitting is enabled
/// and a target-error column only when the scenario has ground truth.
struct MetricsSchema {
    std::vector<std::string> reflection_names;
    std::vector<std::string> pair_names;  // "0_2", ...
    std::vector<std::string> single_names;
    bool with_fitting = false;
    bool with_ground_truth = false;

    static MetricsSchema build(const std::vector<TransformSpec>& specs, const RelationGraph& graph,
                               bool with_fitting, bool with_ground_truth);
    std::string header() const;
    std::string row(const MetricsRecord& r) const;
};

void export_metrics(const std::string& path, const MetricsSchema& schema,
                    const std::vector<MetricsRecord>& records);

/// Parses a metrics CSV back into (header, numeric rows); empty cells are NaN.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<Vec> rows;

    int column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace symrl
