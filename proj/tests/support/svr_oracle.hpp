#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace conglab::testing {

// Brute-force reference solver for the epsilon-insensitive SVR dual:
// accelerated projected gradient (FISTA) on the smooth part of
//   min 1/2 (a-s)'K(a-s) - y'(a-s) + eps*sum(a+s),  0 <= a,s <= C,
//   sum(a) = sum(s),
// with the coupling constraint enforced by a bisection projection. Slow and
// simple on purpose; used only to cross-check the production solver.
struct OracleSolution {
    std::vector<double> beta; // a - s
    double bias = 0.0;
};

inline void project_coupled(std::vector<double>& u, std::vector<double>& v, double c) {
    const std::size_t n = u.size();
    double bound = 2.0 * c;
    for (double x : u) bound = std::max(bound, std::abs(x));
    for (double x : v) bound = std::max(bound, std::abs(x));
    double lo = -2.0 * c - bound, hi = 2.0 * c + bound;
    auto gap = [&](double lam) {
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g += std::clamp(u[i] - lam, 0.0, c);
            g -= std::clamp(v[i] + lam, 0.0, c);
        }
        return g;
    };
    for (int it = 0; it < 100; ++it) {
        const double lam = 0.5 * (lo + hi);
        (gap(lam) > 0 ? lo : hi) = lam;
    }
    const double lam = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::clamp(u[i] - lam, 0.0, c);
        v[i] = std::clamp(v[i] + lam, 0.0, c);
    }
}

inline OracleSolution oracle_svr(const Eigen::MatrixXd& k, const std::vector<double>& y,
                                 double c, double eps, int iters = 40000) {
    const std::size_t n = y.size();
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), long(n));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    const double lipschitz = 2.0 * eig.eigenvalues().maxCoeff() + 1e-9;

    std::vector<double> a(n, 0.0), s(n, 0.0), ya(n, 0.0), ys(n, 0.0);
    double t = 1.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd beta(static_cast<long>(n));
        for (std::size_t i = 0; i < n; ++i) beta[long(i)] = ya[i] - ys[i];
        const Eigen::VectorXd kb = k * beta;

        std::vector<double> na(n), ns(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ga = kb[long(i)] - yv[long(i)] + eps;
            const double gs = -kb[long(i)] + yv[long(i)] + eps;
            na[i] = ya[i] - ga / lipschitz;
            ns[i] = ys[i] - gs / lipschitz;
        }
        project_coupled(na, ns, c);

        const double t2 = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i) {
            ya[i] = na[i] + ((t - 1.0) / t2) * (na[i] - a[i]);
            ys[i] = ns[i] + ((t - 1.0) / t2) * (ns[i] - s[i]);
        }
        a = std::move(na);
        s = std::move(ns);
        t = t2;
    }

    OracleSolution sol;
    sol.beta.resize(n);
    Eigen::VectorXd beta(static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i) {
        sol.beta[i] = a[i] - s[i];
        beta[long(i)] = sol.beta[i];
    }
    const Eigen::VectorXd f = yv - k * beta;

    double b_lo = -1e300, b_hi = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        const double up = sol.beta[i] >= -1e-10 ? f[long(i)] - eps : f[long(i)] + eps;
        const double dn = sol.beta[i] <= 1e-10 ? f[long(i)] + eps : f[long(i)] - eps;
        if (sol.beta[i] < c - 1e-9) b_lo = std::max(b_lo, up);
        if (sol.beta[i] > -c + 1e-9) b_hi = std::min(b_hi, dn);
    }
    sol.bias = 0.5 * (b_lo + b_hi);
    return sol;
}

} // namespace conglab::testing
