#pragma once

#include "conglab/series.hpp"

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

namespace conglab {

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1; // on standardized targets
    double sigma = 0.0;   // 0 = median pairwise distance of standardized features
    double kkt_tol = 1e-3;
    long max_iter = 1000000;
    std::size_t row_cap = 5000; // uniform thinning above this
    std::chrono::milliseconds fit_timeout{0}; // 0 = no limit
};

// RBF-kernel epsilon-insensitive SVR. beta holds the dual coefficients
// alpha_i - alpha_i* of the standardized problem (features and targets both
// standardized by the stored scaling), so sum(beta) = 0 and |beta| <= C hold
// directly. Only rows with beta != 0 are kept as support vectors.
struct SvrModel {
    std::size_t feature_width = 0;
    double c = 1.0;
    double epsilon = 0.1;
    double sigma = 1.0; // bandwidth on standardized features
    std::vector<double> feat_mean;
    std::vector<double> feat_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;
    std::vector<double> support_vectors; // row-major, sv_count x feature_width
    std::vector<double> beta;
    double bias = 0.0; // standardized-target space

    std::size_t sv_count() const { return beta.size(); }
};

// Solver diagnostics for audits: the full coefficient vector over the rows
// actually used, plus standardized targets and fitted values on them.
struct SvrFitInfo {
    std::vector<double> beta;
    std::vector<double> std_targets;
    std::vector<double> std_fitted;
    long iterations = 0;
    double final_violation = 0.0;
    std::size_t train_rows = 0;
    bool capped = false;
};

// Pairwise coordinate optimization on the dual (maximal-violating-pair
// selection, exact piecewise-quadratic pair updates) until the KKT violation
// falls below kkt_tol. Throws NumericError on non-convergence (carrying the
// residual violation), on fit timeout, and on a degenerate zero bandwidth.
SvrModel svr_fit(const WindowedDataset& train, const SvrParams& params,
                 SvrFitInfo* info = nullptr);

double svr_predict(const SvrModel& model, std::span<const double> x);

// Identity pass-through that rejects datasets built without the neighbor-sum
// column; feeding its result to svr_fit is the graph variant.
const WindowedDataset& graph_features(const WindowedDataset& train);

} // namespace conglab
