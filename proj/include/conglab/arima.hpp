#pragma once

#include <span>
#include <string>
#include <vector>

namespace conglab {

struct ArimaOrder {
    int p = 1;
    int d = 0;
    int q = 0;
};

// AR weights estimated by conditional least squares on the d-times
// differenced series; MA weights by iterated residual regression. The
// intercept c is the regression constant, so the process mean of a
// stationary AR fit is c / (1 - sum(ar)).
struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
    bool stationary_warning = false; // AR(1) with |phi| >= 1
    bool degenerate = false;         // singular design (e.g. constant series)
    std::vector<double> residuals;      // training innovations, chunk order
    std::vector<double> tail_values;    // last p + d observations (oldest first)
    std::vector<double> tail_residuals; // last q innovations (oldest first)

    // Defined for stationary fits; callers must check stationary_warning.
    double mean() const;
};

// Training data may arrive as disjoint runs (one per day, say); lagged
// regression rows never straddle a run boundary. Throws DataError when the
// combined length is not > p + d + q + 10.
ArimaModel arima_fit(const std::vector<std::vector<double>>& runs, const ArimaOrder& order);
ArimaModel arima_fit(const std::vector<double>& series, const ArimaOrder& order);

ArimaOrder parse_arima_order(const std::string& text);

// Continues the recursion from the end of the training series with future
// innovations set to zero; d > 0 forecasts are integrated back to the
// original scale.
std::vector<double> arima_forecast(const ArimaModel& model, int steps);

// Same recursion, but conditioned on a fresh history window (original
// scale, oldest first, length >= p + d): residuals are rebuilt by running
// one-step predictions through the window.
std::vector<double> arima_forecast_from(const ArimaModel& model, std::span<const double> history,
                                        int steps);

} // namespace conglab
