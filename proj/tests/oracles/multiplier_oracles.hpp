#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Second-order central-difference Laplacian of f at x with step h.
inline cplx fd_laplacian(const std::function<cplx(const std::vector<double>&)>& f, std::vector<double> x, double h) {
    const cplx c = f(x);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double xj = x[j];
        x[j] = xj + h;
        const cplx p = f(x);
        x[j] = xj - h;
        const cplx m = f(x);
        x[j] = xj;
        acc += (p - 2.0 * c + m) / (h * h);
    }
    return acc;
}

// Central-difference gradient of f at x with step h.
inline std::vector<cplx> fd_gradient(const std::function<cplx(const std::vector<double>&)>& f, std::vector<double> x,
                                     double h) {
    std::vector<cplx> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double xj = x[j];
        x[j] = xj + h;
        const cplx p = f(x);
        x[j] = xj - h;
        const cplx m = f(x);
        x[j] = xj;
        g[j] = (p - m) / (2.0 * h);
    }
    return g;
}

// For psi = r^(-k+eps) on r <= 1 and r^(-k-eps) beyond, with 2k = d - 2
// (Hardy) or 2k = d - 1 (weighted Hardy), both integrals split at r = 1 into
// elementary power integrals: numerator 1/eps, denominator (k^2 + eps^2)/eps.
inline double two_sided_power_ratio(double k, double eps) { return 1.0 / (k * k + eps * eps); }

// Gauss-Legendre nodes and weights on [a, b] by Newton on P_n.
inline void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[i] = 0.5 * (a + b) + 0.5 * (b - a) * t;
        w[i] = (b - a) / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace oracle
