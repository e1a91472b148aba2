#include "conglab/report.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace conglab {

namespace {

std::string fixed2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

constexpr std::size_t kCellWidth = 24; // "RMSE MAE CORR" group incl. the star

std::string metrics_cell(const RunResult& r, bool best) {
    if (!r.error.empty()) return pad_left("-", 8) + pad_left("-", 8) + pad_left("-", 7) + " ";
    const NodeMetrics& a = r.report.aggregate;
    std::string cell = pad_left(fixed2(a.rmse), 8) + pad_left(fixed2(a.mae), 8) +
                       pad_left(a.corr ? fixed2(*a.corr) : "-", 7);
    cell += best ? "*" : " ";
    return cell;
}

} // namespace

std::string render_grid_table(const std::vector<RunResult>& results) {
    if (results.empty()) return "no results\n";

    // Preserve split order of first appearance; canonical model order.
    std::vector<std::string> splits;
    for (const RunResult& r : results)
        if (std::find(splits.begin(), splits.end(), r.split_label) == splits.end())
            splits.push_back(r.split_label);

    const ModelKind model_order[] = {ModelKind::Ha, ModelKind::Svr, ModelKind::SvrGraph,
                                     ModelKind::Arima};
    std::vector<ModelKind> models;
    for (ModelKind k : model_order)
        for (const RunResult& r : results)
            if (r.model == k) {
                models.push_back(k);
                break;
            }

    std::ostringstream out;
    for (const std::string& split : splits) {
        using Key = std::tuple<long long, long long, long long>;
        std::map<Key, std::map<int, const RunResult*>> rows;
        for (const RunResult& r : results) {
            if (r.split_label != split) continue;
            const Key key{r.interval.count(), r.sequence_length.count(),
                          r.prediction_length.count()};
            const int mi = int(std::find(models.begin(), models.end(), r.model) -
                               models.begin());
            rows[key][mi] = &r;
        }

        out << "split: " << split << "\n";
        out << pad_right("interval", 9) << pad_right("seq", 6) << pad_right("pred", 6);
        for (ModelKind k : models)
            out << "| " << pad_right(model_kind_name(k) + " rmse/mae/corr", kCellWidth);
        out << "\n";

        for (const auto& [key, per_model] : rows) {
            out << pad_right(format_minutes(Seconds{std::get<0>(key)}), 9)
                << pad_right(format_minutes(Seconds{std::get<1>(key)}), 6)
                << pad_right(format_minutes(Seconds{std::get<2>(key)}), 6);

            int best = -1;
            double best_rmse = 0.0;
            for (std::size_t mi = 0; mi < models.size(); ++mi) {
                auto it = per_model.find(int(mi));
                if (it == per_model.end() || !it->second->error.empty()) continue;
                const double v = it->second->report.aggregate.rmse;
                if (best < 0 || v < best_rmse) {
                    best = int(mi);
                    best_rmse = v;
                }
            }
            for (std::size_t mi = 0; mi < models.size(); ++mi) {
                auto it = per_model.find(int(mi));
                if (it == per_model.end()) {
                    out << "| " << pad_right("", kCellWidth);
                    continue;
                }
                out << "| " << pad_right(metrics_cell(*it->second, int(mi) == best), kCellWidth);
            }
            out << "\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string render_topk_table(const std::vector<ComboRank>& ranks, int top_k) {
    if (ranks.empty()) return "no results\n";
    if (top_k < 1) throw UsageError("top-k must be at least 1");
    std::ostringstream out;
    out << pad_right("rank", 6) << pad_right("combination", 16) << pad_left("avg_rmse", 10)
        << pad_left("avg_mae", 10) << pad_left("models", 8) << "\n";
    const std::size_t n = std::min(ranks.size(), std::size_t(top_k));
    for (std::size_t i = 0; i < n; ++i) {
        const ComboRank& r = ranks[i];
        out << pad_right(std::to_string(i + 1), 6) << pad_right(r.key, 16)
            << pad_left(fixed2(r.avg_rmse), 10) << pad_left(fixed2(r.avg_mae), 10)
            << pad_left(std::to_string(r.model_count), 8) << "\n";
    }
    return out.str();
}

std::string render_outlier_table(const OutlierReport& report) {
    std::ostringstream out;
    out << pad_right("scope", 10) << pad_left("rmse", 10) << pad_left("mae", 10)
        << pad_left("corr", 8) << pad_left("n", 8) << "\n";
    auto row = [&](const std::string& name, const NodeMetrics& m) {
        out << pad_right(name, 10) << pad_left(fixed2(m.rmse), 10) << pad_left(fixed2(m.mae), 10)
            << pad_left(m.corr ? fixed2(*m.corr) : "-", 8) << pad_left(std::to_string(m.n), 8)
            << "\n";
    };
    row("before", report.before);
    row("after", report.after);
    for (const auto& [node, metrics] : report.excluded) row("- " + node, metrics);
    return out.str();
}

void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::string& path) {
    CsvTable table;
    table.header = {"timestamp", "node", "truth", "prediction"};
    for (const PredictionRow& row : rows)
        table.rows.push_back({to_iso_timestamp(row.time), row.node, fmt_double(row.truth),
                              fmt_double(row.prediction)});
    write_csv(path, table);
}

std::vector<PredictionRow> read_predictions_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::size_t c_time = table.column("timestamp");
    const std::size_t c_node = table.column("node");
    const std::size_t c_truth = table.column("truth");
    const std::size_t c_pred = table.column("prediction");
    std::vector<PredictionRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        PredictionRow row;
        row.time = parse_iso_timestamp(r[c_time]);
        row.node = r[c_node];
        row.truth = parse_double(r[c_truth]);
        row.prediction = parse_double(r[c_pred]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_series_svg(const std::string& path, const std::string& title,
                      const std::vector<Timestamp>& times, const std::vector<double>& truth,
                      const std::vector<double>& prediction) {
    if (times.size() != truth.size() || times.size() != prediction.size())
        throw DataError("plot series lengths differ");
    if (times.empty()) throw DataError("plot needs at least one instant");

    constexpr int kWidth = 960, kHeight = 340;
    constexpr int kLeft = 64, kRight = 16, kTop = 40, kBottom = 36;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double lo = truth[0], hi = truth[0];
    for (double v : truth) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : prediction) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) {
        lo -= 1.0;
        hi += 1.0;
    }

    auto x_of = [&](std::size_t i) {
        return times.size() == 1
                   ? kLeft + plot_w / 2
                   : kLeft + plot_w * double(i) / double(times.size() - 1);
    };
    auto y_of = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };
    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    auto polyline = [&](const std::vector<double>& series, const char* color) {
        std::string points;
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (!points.empty()) points += " ";
            points += coord(x_of(i)) + "," + coord(y_of(series[i]));
        }
        return "  <polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <text x=\"" + std::to_string(kLeft) +
           "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";
    svg += "  <rect x=\"" + std::to_string(kLeft) + "\" y=\"" + std::to_string(kTop) +
           "\" width=\"" + coord(plot_w) + "\" height=\"" + coord(plot_h) +
           "\" fill=\"none\" stroke=\"#999\"/>\n";
    svg += "  <text x=\"8\" y=\"" + coord(kTop + 10) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt_double(hi) + "</text>\n";
    svg += "  <text x=\"8\" y=\"" + coord(kTop + plot_h) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt_double(lo) + "</text>\n";
    svg += "  <text x=\"" + std::to_string(kLeft) + "\" y=\"" + std::to_string(kHeight - 10) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + to_iso_timestamp(times.front()) +
           "</text>\n";
    svg += "  <text x=\"" + coord(kWidth - kRight - 150) + "\" y=\"" +
           std::to_string(kHeight - 10) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
           to_iso_timestamp(times.back()) + "</text>\n";
    svg += polyline(truth, "#1f77b4");
    svg += polyline(prediction, "#d62728");
    svg += "  <text x=\"" + coord(kWidth - kRight - 190) +
           "\" y=\"22\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f77b4\">truth"
           "</text>\n";
    svg += "  <text x=\"" + coord(kWidth - kRight - 120) +
           "\" y=\"22\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">prediction"
           "</text>\n";
    svg += "</svg>\n";
    write_text_atomic(path, svg);
}

} // namespace conglab
