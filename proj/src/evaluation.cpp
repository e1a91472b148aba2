#include "conglab/evaluation.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace conglab {

namespace {

void check_lengths(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size())
        throw DataError("truth has " + std::to_string(truth.size()) + " values, predictions " +
                        std::to_string(pred.size()));
    if (truth.empty()) throw DataError("cannot score empty vectors");
}

} // namespace

double rmse(std::span<const double> truth, std::span<const double> pred) {
    check_lengths(truth, pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double d = pred[i] - truth[i];
        acc += d * d;
    }
    return std::sqrt(acc / double(truth.size()));
}

double mae(std::span<const double> truth, std::span<const double> pred) {
    check_lengths(truth, pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) acc += std::abs(pred[i] - truth[i]);
    return acc / double(truth.size());
}

std::optional<double> corr(std::span<const double> truth, std::span<const double> pred) {
    check_lengths(truth, pred);
    if (truth.size() < 2) throw DataError("correlation needs at least 2 samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        mx += truth[i];
        my += pred[i];
    }
    mx /= double(truth.size());
    my /= double(truth.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double dx = truth[i] - mx, dy = pred[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

NodeMetrics compute_metrics(std::span<const double> truth, std::span<const double> pred) {
    NodeMetrics m;
    m.rmse = rmse(truth, pred);
    m.mae = mae(truth, pred);
    m.n = truth.size();
    if (truth.size() >= 2) m.corr = corr(truth, pred);
    return m;
}

EvaluationReport aggregate(std::vector<std::pair<IntersectionId, NodeMetrics>> per_node) {
    if (per_node.empty()) throw DataError("cannot aggregate an empty report");
    for (const auto& [node, metrics] : per_node)
        if (metrics.n == 0) throw DataError("node '" + node + "' reports zero samples");
    std::sort(per_node.begin(), per_node.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    EvaluationReport report;
    double sum_rmse = 0.0, sum_mae = 0.0, sum_corr = 0.0;
    std::size_t corr_n = 0, total_n = 0;
    for (const auto& [node, metrics] : per_node) {
        sum_rmse += metrics.rmse;
        sum_mae += metrics.mae;
        total_n += metrics.n;
        if (metrics.corr) {
            sum_corr += *metrics.corr;
            ++corr_n;
        }
    }
    report.aggregate.rmse = sum_rmse / double(per_node.size());
    report.aggregate.mae = sum_mae / double(per_node.size());
    report.aggregate.n = total_n;
    if (corr_n > 0) report.aggregate.corr = sum_corr / double(corr_n);
    report.per_node = std::move(per_node);
    return report;
}

void write_report_csv(const EvaluationReport& report, const std::string& path) {
    CsvTable table;
    table.header = {"node", "rmse", "mae", "corr", "n"};
    auto row_of = [](const std::string& name, const NodeMetrics& m) {
        return std::vector<std::string>{name, fmt_double(m.rmse), fmt_double(m.mae),
                                        m.corr ? fmt_double(*m.corr) : "",
                                        std::to_string(m.n)};
    };
    for (const auto& [node, metrics] : report.per_node) table.rows.push_back(row_of(node, metrics));
    table.rows.push_back(row_of("AGGREGATE", report.aggregate));
    write_csv(path, table);
}

EvaluationReport read_report_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {"node", "rmse", "mae", "corr", "n"};
    if (table.header != expected)
        throw SchemaError("report file '" + path + "' has an unexpected header");
    std::vector<std::pair<IntersectionId, NodeMetrics>> per_node;
    for (const auto& row : table.rows) {
        if (row[0] == "AGGREGATE") continue; // recomputed below
        NodeMetrics m;
        m.rmse = parse_double(row[1]);
        m.mae = parse_double(row[2]);
        if (!row[3].empty()) m.corr = parse_double(row[3]);
        m.n = std::size_t(parse_int(row[4]));
        per_node.emplace_back(row[0], m);
    }
    return aggregate(std::move(per_node));
}

} // namespace conglab
