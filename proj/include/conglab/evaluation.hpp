#pragma once

#include "conglab/road_network.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace conglab {

double rmse(std::span<const double> truth, std::span<const double> pred);
double mae(std::span<const double> truth, std::span<const double> pred);
// nullopt when either vector is constant (undefined correlation); throws on
// lengths < 2.
std::optional<double> corr(std::span<const double> truth, std::span<const double> pred);

struct NodeMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> corr;
    std::size_t n = 0;
};

struct EvaluationReport {
    std::vector<std::pair<IntersectionId, NodeMetrics>> per_node; // sorted by node id
    NodeMetrics aggregate; // unweighted means; corr over nodes where defined
};

// aggregate.n sums the per-node counts; rmse/mae average over all nodes,
// corr only over nodes with a defined value (nullopt if there are none).
EvaluationReport aggregate(std::vector<std::pair<IntersectionId, NodeMetrics>> per_node);

NodeMetrics compute_metrics(std::span<const double> truth, std::span<const double> pred);

// CSV with header node,rmse,mae,corr,n; undefined corr is an empty field;
// the AGGREGATE row comes last.
void write_report_csv(const EvaluationReport& report, const std::string& path);
EvaluationReport read_report_csv(const std::string& path);

} // namespace conglab
