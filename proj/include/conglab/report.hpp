#pragma once

#include "conglab/experiment.hpp"

#include <string>
#include <vector>

namespace conglab {

// Plain-text table per split: one row per combination (grouped by interval,
// then sequence length, then horizon), an RMSE/MAE/CORR column group per
// model at 2 decimals, the lowest-RMSE model of each row starred. Failed
// cells render as dashes. Empty input renders "no results".
std::string render_grid_table(const std::vector<RunResult>& results);

// Ranked combinations, best first, clipped to top_k.
std::string render_topk_table(const std::vector<ComboRank>& ranks, int top_k);

std::string render_outlier_table(const OutlierReport& report);

// Truth/prediction rows as written by the predict command and consumed by
// the report plots: timestamp,node,truth,prediction.
struct PredictionRow {
    Timestamp time{};
    IntersectionId node;
    double truth = 0.0;
    double prediction = 0.0;
};

void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::string& path);
std::vector<PredictionRow> read_predictions_csv(const std::string& path);

// Standalone SVG line chart of the two series over shared instants.
void write_series_svg(const std::string& path, const std::string& title,
                      const std::vector<Timestamp>& times, const std::vector<double>& truth,
                      const std::vector<double>& prediction);

} // namespace conglab
