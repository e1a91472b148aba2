#include "conglab/svr.hpp"

#include "conglab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

namespace conglab {

namespace {

constexpr double kEdge = 1e-12; // slack for box-boundary membership tests

// Kernel rows over standardized features, computed on demand with an LRU
// budget so large fits stay within memory.
class KernelCache {
public:
    KernelCache(const std::vector<double>& x, std::size_t n, std::size_t dim, double sigma)
        : x_(x), n_(n), dim_(dim), inv_two_sigma2_(1.0 / (2.0 * sigma * sigma)) {
        const std::size_t budget_bytes = 128ull << 20;
        max_rows_ = std::max<std::size_t>(2, budget_bytes / (sizeof(double) * std::max<std::size_t>(n_, 1)));
    }

    const std::vector<double>& row(std::size_t i, std::size_t pinned) {
        auto it = rows_.find(i);
        if (it != rows_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.first);
            return it->second.second;
        }
        std::vector<double> r(n_);
        const double* xi = x_.data() + i * dim_;
        for (std::size_t k = 0; k < n_; ++k) {
            const double* xk = x_.data() + k * dim_;
            double d2 = 0.0;
            for (std::size_t f = 0; f < dim_; ++f) {
                double d = xi[f] - xk[f];
                d2 += d * d;
            }
            r[k] = std::exp(-d2 * inv_two_sigma2_);
        }
        while (rows_.size() >= max_rows_) {
            auto victim = lru_.end();
            --victim;
            if (*victim == pinned) {
                if (lru_.size() < 2) break;
                --victim;
            }
            rows_.erase(*victim);
            lru_.erase(victim);
        }
        lru_.push_front(i);
        auto [ins, ok] = rows_.emplace(i, std::make_pair(lru_.begin(), std::move(r)));
        return ins->second.second;
    }

private:
    const std::vector<double>& x_;
    std::size_t n_, dim_;
    double inv_two_sigma2_;
    std::size_t max_rows_ = 2;
    std::list<std::size_t> lru_;
    std::unordered_map<std::size_t, std::pair<std::list<std::size_t>::iterator, std::vector<double>>>
        rows_;
};

double median_pairwise_distance(const std::vector<double>& x, std::size_t n, std::size_t dim) {
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.data() + i * dim;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* xj = x.data() + j * dim;
            double d2 = 0.0;
            for (std::size_t f = 0; f < dim; ++f) {
                double d = xi[f] - xj[f];
                d2 += d * d;
            }
            dists.push_back(std::sqrt(d2));
        }
    }
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    return *mid;
}

} // namespace

SvrModel svr_fit(const WindowedDataset& train, const SvrParams& params, SvrFitInfo* info) {
    if (train.rows() < 2)
        throw DataError("support vector fit needs at least 2 training rows, got " +
                        std::to_string(train.rows()));
    if (!(params.c > 0.0)) throw UsageError("box constraint C must be positive");
    if (!(params.epsilon >= 0.0)) throw UsageError("tube width epsilon must be non-negative");
    if (params.sigma < 0.0) throw UsageError("bandwidth sigma must be positive, or 0 for auto");
    if (params.row_cap < 2) throw UsageError("row cap must be at least 2");

    const std::size_t dim = train.width();
    const std::size_t n_full = train.rows();
    const bool capped = n_full > params.row_cap;
    std::vector<std::size_t> use;
    if (capped) {
        use.reserve(params.row_cap);
        for (std::size_t k = 0; k < params.row_cap; ++k)
            use.push_back(k * n_full / params.row_cap);
    } else {
        use.resize(n_full);
        for (std::size_t k = 0; k < n_full; ++k) use[k] = k;
    }
    const std::size_t n = use.size();

    std::vector<double> feat_mean(dim, 0.0), feat_scale(dim, 0.0);
    double target_mean = 0.0, target_scale = 0.0;
    for (std::size_t k : use) {
        auto row = train.row(k);
        for (std::size_t f = 0; f < dim; ++f) feat_mean[f] += row[f];
        target_mean += train.targets[k];
    }
    for (std::size_t f = 0; f < dim; ++f) feat_mean[f] /= double(n);
    target_mean /= double(n);
    for (std::size_t k : use) {
        auto row = train.row(k);
        for (std::size_t f = 0; f < dim; ++f) {
            double d = row[f] - feat_mean[f];
            feat_scale[f] += d * d;
        }
        double d = train.targets[k] - target_mean;
        target_scale += d * d;
    }
    for (std::size_t f = 0; f < dim; ++f) {
        feat_scale[f] = std::sqrt(feat_scale[f] / double(n));
        if (feat_scale[f] == 0.0) feat_scale[f] = 1.0;
    }
    target_scale = std::sqrt(target_scale / double(n));
    if (target_scale == 0.0) target_scale = 1.0;

    std::vector<double> x(n * dim);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto row = train.row(use[k]);
        for (std::size_t f = 0; f < dim; ++f)
            x[k * dim + f] = (row[f] - feat_mean[f]) / feat_scale[f];
        y[k] = (train.targets[use[k]] - target_mean) / target_scale;
    }

    double sigma = params.sigma;
    if (sigma == 0.0) {
        sigma = median_pairwise_distance(x, n, dim);
        if (sigma == 0.0)
            throw NumericError("degenerate bandwidth: median pairwise distance of the "
                               "standardized features is zero");
    }

    const double C = params.c;
    const double eps = params.epsilon;
    KernelCache kernel(x, n, dim, sigma);

    std::vector<double> beta(n, 0.0);
    std::vector<double> F = y; // F_k = y_k - (K beta)_k
    long it = 0;
    double viol = 0.0;
    const auto started = std::chrono::steady_clock::now();

    while (true) {
        if (it >= params.max_iter)
            throw NumericError("solver did not converge: KKT violation " + std::to_string(viol) +
                               " after " + std::to_string(it) + " iterations");
        if (params.fit_timeout.count() > 0 && (it & 0xFF) == 0 &&
            std::chrono::steady_clock::now() - started > params.fit_timeout)
            throw NumericError("fit timeout after " + std::to_string(it) + " iterations");
        ++it;

        std::size_t ui = n, dj = n;
        double up_best = -std::numeric_limits<double>::infinity();
        double dn_best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (beta[k] < C - kEdge) {
                double v = beta[k] >= 0.0 ? F[k] - eps : F[k] + eps;
                if (v > up_best) {
                    up_best = v;
                    ui = k;
                }
            }
            if (beta[k] > -C + kEdge) {
                double v = beta[k] <= 0.0 ? F[k] + eps : F[k] - eps;
                if (v < dn_best) {
                    dn_best = v;
                    dj = k;
                }
            }
        }
        viol = up_best - dn_best;
        if (viol < params.kkt_tol) break;

        const std::size_t i = ui, j = dj;
        const std::vector<double>& Ki = kernel.row(i, j);
        const std::vector<double>& Kj = kernel.row(j, i);
        const double eta = Ki[i] + Kj[j] - 2.0 * Ki[j];
        const double lo = std::max(-C - beta[i], beta[j] - C);
        const double hi = std::min(C - beta[i], beta[j] + C);

        // The objective along (beta_i + d, beta_j - d) is piecewise quadratic
        // with kinks where either coefficient crosses zero.
        double cand[4] = {lo, hi, 0, 0};
        int n_cand = 2;
        if (lo < -beta[i] && -beta[i] < hi) cand[n_cand++] = -beta[i];
        if (lo < beta[j] && beta[j] < hi) cand[n_cand++] = beta[j];
        std::sort(cand, cand + n_cand);

        const double Gi = F[i], Gj = F[j];
        double best_d = 0.0, best_gain = 0.0;
        for (int s = 0; s + 1 < n_cand; ++s) {
            const double a = cand[s], b = cand[s + 1];
            if (!(a < b)) continue;
            const double mid = 0.5 * (a + b);
            const double si = beta[i] + mid > 0.0 ? 1.0 : -1.0;
            const double sj = beta[j] - mid > 0.0 ? 1.0 : -1.0;
            const double slope0 = Gi - Gj - eps * si + eps * sj;
            double d;
            if (eta > 1e-15)
                d = std::clamp(slope0 / eta, a, b);
            else
                d = slope0 < 0.0 ? a : b;
            const double gain = d * (Gi - Gj) - 0.5 * eta * d * d -
                                eps * (std::abs(beta[i] + d) - std::abs(beta[i])) -
                                eps * (std::abs(beta[j] - d) - std::abs(beta[j]));
            if (gain > best_gain) {
                best_gain = gain;
                best_d = d;
            }
        }
        if (best_gain <= 1e-16) break; // numerically stalled at the optimum

        beta[i] += best_d;
        beta[j] -= best_d;
        for (std::size_t k = 0; k < n; ++k) F[k] -= best_d * (Ki[k] - Kj[k]);
    }

    double b_lo = -std::numeric_limits<double>::infinity();
    double b_hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (beta[k] < C - kEdge) b_lo = std::max(b_lo, beta[k] >= 0.0 ? F[k] - eps : F[k] + eps);
        if (beta[k] > -C + kEdge) b_hi = std::min(b_hi, beta[k] <= 0.0 ? F[k] + eps : F[k] - eps);
    }
    const double bias = 0.5 * (b_lo + b_hi);

    SvrModel model;
    model.feature_width = dim;
    model.c = C;
    model.epsilon = eps;
    model.sigma = sigma;
    model.feat_mean = std::move(feat_mean);
    model.feat_scale = std::move(feat_scale);
    model.target_mean = target_mean;
    model.target_scale = target_scale;
    model.bias = bias;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(beta[k]) <= kEdge) continue;
        model.beta.push_back(beta[k]);
        model.support_vectors.insert(model.support_vectors.end(), x.begin() + k * dim,
                                     x.begin() + (k + 1) * dim);
    }

    if (info) {
        info->beta = beta;
        info->std_targets = y;
        info->std_fitted.resize(n);
        for (std::size_t k = 0; k < n; ++k) info->std_fitted[k] = y[k] - F[k] + bias;
        info->iterations = it;
        info->final_violation = viol;
        info->train_rows = n;
        info->capped = capped;
    }
    return model;
}

double svr_predict(const SvrModel& model, std::span<const double> x) {
    if (x.size() != model.feature_width)
        throw DataError("feature row has width " + std::to_string(x.size()) +
                        ", model expects " + std::to_string(model.feature_width));
    const std::size_t dim = model.feature_width;
    const double inv_two_sigma2 = 1.0 / (2.0 * model.sigma * model.sigma);
    double acc = model.bias;
    for (std::size_t s = 0; s < model.sv_count(); ++s) {
        const double* sv = model.support_vectors.data() + s * dim;
        double d2 = 0.0;
        for (std::size_t f = 0; f < dim; ++f) {
            double d = (x[f] - model.feat_mean[f]) / model.feat_scale[f] - sv[f];
            d2 += d * d;
        }
        acc += model.beta[s] * std::exp(-d2 * inv_two_sigma2);
    }
    return model.target_mean + model.target_scale * acc;
}

const WindowedDataset& graph_features(const WindowedDataset& train) {
    if (!train.has_neighbor_sum)
        throw DataError("dataset for node '" + train.target_node +
                        "' lacks the neighbor-sum column");
    return train;
}

} // namespace conglab
