#include "conglab/arima.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace conglab {

namespace {

void check_order(const ArimaOrder& order) {
    if (order.p < 0 || order.p > 3 || order.q < 0 || order.q > 3 || order.d < 0 || order.d > 2)
        throw UsageError("unsupported order (" + std::to_string(order.p) + "," +
                         std::to_string(order.d) + "," + std::to_string(order.q) +
                         "); need p <= 3, d <= 2, q <= 3");
}

std::vector<double> difference(std::span<const double> series, int d) {
    std::vector<double> z(series.begin(), series.end());
    for (int round = 0; round < d; ++round) {
        for (std::size_t t = z.size(); t-- > 1;) z[t] -= z[t - 1];
        z.erase(z.begin());
    }
    return z;
}

struct Regression {
    std::vector<double> coef; // intercept first
    std::vector<double> residuals;
    bool degenerate = false;
};

// OLS with intercept; flags rank-deficient designs instead of solving them.
Regression least_squares(const std::vector<std::vector<double>>& rows,
                         const std::vector<double>& targets) {
    const std::size_t n = rows.size();
    const std::size_t k = rows[0].size() + 1;
    Eigen::MatrixXd a(n, k);
    Eigen::VectorXd b(n);
    for (std::size_t r = 0; r < n; ++r) {
        a(r, 0) = 1.0;
        for (std::size_t c = 0; c < rows[r].size(); ++c) a(r, c + 1) = rows[r][c];
        b(r) = targets[r];
    }
    Regression reg;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < static_cast<Eigen::Index>(k)) {
        reg.degenerate = true;
        return reg;
    }
    Eigen::VectorXd coef = qr.solve(b);
    reg.coef.assign(coef.data(), coef.data() + k);
    Eigen::VectorXd resid = b - a * coef;
    reg.residuals.assign(resid.data(), resid.data() + n);
    return reg;
}

// Innovations of the fitted recursion over one differenced run, with
// pre-sample values and residuals taken as zero contributions.
std::vector<double> run_innovations(const std::vector<double>& z, double c,
                                    const std::vector<double>& ar,
                                    const std::vector<double>& ma) {
    std::vector<double> e(z.size(), 0.0);
    for (std::size_t t = ar.size(); t < z.size(); ++t) {
        double pred = c;
        for (std::size_t i = 0; i < ar.size(); ++i) pred += ar[i] * z[t - 1 - i];
        for (std::size_t j = 0; j < ma.size(); ++j)
            if (t >= j + 1) pred += ma[j] * e[t - 1 - j];
        e[t] = z[t] - pred;
    }
    return e;
}

} // namespace

double ArimaModel::mean() const {
    double s = 0.0;
    for (double phi : ar) s += phi;
    return intercept / (1.0 - s);
}

ArimaModel arima_fit(const std::vector<std::vector<double>>& runs, const ArimaOrder& order) {
    check_order(order);
    const int p = order.p, d = order.d, q = order.q;

    std::size_t total = 0;
    for (const auto& run : runs) total += run.size();
    if (total <= static_cast<std::size_t>(p + d + q + 10))
        throw DataError("series of length " + std::to_string(total) +
                        " is too short for order (" + std::to_string(p) + "," +
                        std::to_string(d) + "," + std::to_string(q) + "); need more than " +
                        std::to_string(p + d + q + 10) + " observations");

    std::vector<std::vector<double>> zs;
    for (const auto& run : runs)
        if (run.size() > static_cast<std::size_t>(d)) zs.push_back(difference(run, d));

    ArimaModel model;
    model.order = order;
    model.ar.assign(static_cast<std::size_t>(p), 0.0);
    model.ma.assign(static_cast<std::size_t>(q), 0.0);

    auto gather = [&](int lag_p, int lag_q, const std::vector<std::vector<double>>* innov,
                      std::vector<std::vector<double>>& rows, std::vector<double>& targets) {
        rows.clear();
        targets.clear();
        const std::size_t start = static_cast<std::size_t>(std::max(lag_p, lag_q));
        for (std::size_t ri = 0; ri < zs.size(); ++ri) {
            const auto& z = zs[ri];
            for (std::size_t t = start; t < z.size(); ++t) {
                std::vector<double> row;
                for (int i = 1; i <= lag_p; ++i) row.push_back(z[t - static_cast<std::size_t>(i)]);
                if (innov)
                    for (int j = 1; j <= lag_q; ++j)
                        row.push_back((*innov)[ri][t - static_cast<std::size_t>(j)]);
                rows.push_back(std::move(row));
                targets.push_back(z[t]);
            }
        }
    };

    auto fall_back_to_mean = [&] {
        model.degenerate = true;
        model.ar.assign(static_cast<std::size_t>(p), 0.0);
        model.ma.assign(static_cast<std::size_t>(q), 0.0);
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& z : zs)
            for (double v : z) {
                sum += v;
                ++n;
            }
        model.intercept = n ? sum / double(n) : 0.0;
    };

    std::vector<std::vector<double>> rows;
    std::vector<double> targets;

    if (q == 0) {
        gather(p, 0, nullptr, rows, targets);
        if (rows.empty() || rows.size() < rows[0].size() + 2) {
            fall_back_to_mean();
        } else {
            Regression reg = least_squares(rows, targets);
            if (reg.degenerate) {
                fall_back_to_mean();
            } else {
                model.intercept = reg.coef[0];
                for (int i = 0; i < p; ++i)
                    model.ar[static_cast<std::size_t>(i)] = reg.coef[static_cast<std::size_t>(i) + 1];
            }
        }
    } else {
        // Hannan-Rissanen: long-AR residuals seed the MA terms, then the
        // regression and the innovations are iterated to a fixed point.
        const int p_long = std::max(p + q, 4);
        gather(p_long, 0, nullptr, rows, targets);
        std::vector<std::vector<double>> innov(zs.size());
        bool seeded = false;
        if (!rows.empty() && rows.size() >= rows[0].size() + 2) {
            Regression seed = least_squares(rows, targets);
            if (!seed.degenerate) {
                std::vector<double> long_ar(seed.coef.begin() + 1, seed.coef.end());
                for (std::size_t ri = 0; ri < zs.size(); ++ri)
                    innov[ri] = run_innovations(zs[ri], seed.coef[0], long_ar, {});
                seeded = true;
            }
        }
        if (!seeded) {
            fall_back_to_mean();
        } else {
            bool solved = false;
            for (int round = 0; round < 50; ++round) {
                gather(p, q, &innov, rows, targets);
                if (rows.empty() || rows.size() < rows[0].size() + 2) break;
                Regression reg = least_squares(rows, targets);
                if (reg.degenerate) break;
                double delta = std::abs(model.intercept - reg.coef[0]);
                model.intercept = reg.coef[0];
                for (int i = 0; i < p; ++i) {
                    delta = std::max(delta, std::abs(model.ar[static_cast<std::size_t>(i)] -
                                                     reg.coef[static_cast<std::size_t>(i) + 1]));
                    model.ar[static_cast<std::size_t>(i)] = reg.coef[static_cast<std::size_t>(i) + 1];
                }
                for (int j = 0; j < q; ++j) {
                    double w = reg.coef[static_cast<std::size_t>(p + j) + 1];
                    delta = std::max(delta, std::abs(model.ma[static_cast<std::size_t>(j)] - w));
                    model.ma[static_cast<std::size_t>(j)] = w;
                }
                solved = true;
                for (std::size_t ri = 0; ri < zs.size(); ++ri)
                    innov[ri] = run_innovations(zs[ri], model.intercept, model.ar, model.ma);
                if (delta < 1e-6) break;
            }
            if (!solved) fall_back_to_mean();
        }
    }

    if (p == 1 && std::abs(model.ar[0]) >= 1.0) model.stationary_warning = true;

    model.residuals.clear();
    for (std::size_t ri = 0; ri < zs.size(); ++ri) {
        std::vector<double> e =
            run_innovations(zs[ri], model.intercept, model.ar, model.ma);
        for (std::size_t t = static_cast<std::size_t>(p); t < e.size(); ++t)
            model.residuals.push_back(e[t]);
        if (ri + 1 == zs.size()) {
            const auto& raw = runs.back();
            const std::size_t keep = static_cast<std::size_t>(p + d);
            if (raw.size() >= keep)
                model.tail_values.assign(raw.end() - static_cast<std::ptrdiff_t>(keep), raw.end());
            const std::size_t kq = std::min<std::size_t>(static_cast<std::size_t>(q), e.size());
            model.tail_residuals.assign(e.end() - static_cast<std::ptrdiff_t>(kq), e.end());
        }
    }
    return model;
}

ArimaModel arima_fit(const std::vector<double>& series, const ArimaOrder& order) {
    return arima_fit(std::vector<std::vector<double>>{series}, order);
}

ArimaOrder parse_arima_order(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw UsageError("order must be p,d,q, got '" + text + "'");
    ArimaOrder order;
    try {
        order.p = static_cast<int>(parse_int(parts[0]));
        order.d = static_cast<int>(parse_int(parts[1]));
        order.q = static_cast<int>(parse_int(parts[2]));
    } catch (const SchemaError&) {
        throw UsageError("order must be p,d,q integers, got '" + text + "'");
    }
    check_order(order);
    return order;
}

namespace {

std::vector<double> forecast_core(const ArimaModel& model, std::span<const double> history,
                                  std::span<const double> innovations, int steps) {
    const int p = model.order.p, d = model.order.d, q = model.order.q;
    if (steps < 1) throw UsageError("forecast steps must be >= 1");
    if (history.size() < static_cast<std::size_t>(p + d))
        throw DataError("history of length " + std::to_string(history.size()) +
                        " is too short; need at least " + std::to_string(p + d) + " values");

    std::vector<double> z = difference(history, d);
    std::deque<double> z_lags(z.end() - p, z.end());        // newest at back
    std::deque<double> e_lags(static_cast<std::size_t>(q), 0.0);
    for (std::size_t j = 0; j < std::min<std::size_t>(innovations.size(), static_cast<std::size_t>(q)); ++j)
        e_lags[e_lags.size() - 1 - j] = innovations[innovations.size() - 1 - j];

    std::vector<double> zhat(static_cast<std::size_t>(steps));
    for (int h = 0; h < steps; ++h) {
        double v = model.intercept;
        for (int i = 0; i < p; ++i)
            v += model.ar[static_cast<std::size_t>(i)] * z_lags[z_lags.size() - 1 - static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j)
            v += model.ma[static_cast<std::size_t>(j)] * e_lags[e_lags.size() - 1 - static_cast<std::size_t>(j)];
        zhat[static_cast<std::size_t>(h)] = v;
        if (p > 0) {
            z_lags.pop_front();
            z_lags.push_back(v);
        }
        if (q > 0) {
            e_lags.pop_front();
            e_lags.push_back(0.0); // future innovations are zero
        }
    }

    // Integrate d times back to the original scale, anchored on the history.
    for (int round = d; round >= 1; --round) {
        std::vector<double> anchor_series = difference(history, round - 1);
        double prev = anchor_series.back();
        for (double& v : zhat) {
            v += prev;
            prev = v;
        }
    }
    return zhat;
}

} // namespace

std::vector<double> arima_forecast(const ArimaModel& model, int steps) {
    if (model.tail_values.size() < static_cast<std::size_t>(model.order.p + model.order.d))
        throw DataError("model does not carry enough trailing observations to forecast");
    return forecast_core(model, model.tail_values, model.tail_residuals, steps);
}

std::vector<double> arima_forecast_from(const ArimaModel& model, std::span<const double> history,
                                        int steps) {
    const int p = model.order.p, d = model.order.d;
    if (history.size() < static_cast<std::size_t>(p + d))
        throw DataError("history of length " + std::to_string(history.size()) +
                        " is too short; need at least " + std::to_string(p + d) + " values");
    std::vector<double> e;
    if (model.order.q > 0) {
        std::vector<double> z = difference(history, d);
        e = run_innovations(z, model.intercept, model.ar, model.ma);
    }
    return forecast_core(model, history, e, steps);
}

} // namespace conglab
