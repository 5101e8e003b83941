#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "oracles/linalg_oracles.hpp"

namespace oracle {

inline double legendre(int l, double x) {
    double p0 = 1.0, p1 = x;
    if (l == 0) return p0;
    for (int k = 1; k < l; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// Gauss-Legendre nodes on [a, b] from the Golub-Welsch oracle, split into panels.
inline void panel_rule(int panels, int order, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    const spectra_cert::Quadrature ref = golub_welsch(order, -1.0, 1.0);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < order; ++i) {
            x.push_back(a + p * h + 0.5 * h * (ref.nodes[i] + 1.0));
            w.push_back(0.5 * h * ref.weights[i]);
        }
}

// Projection of exp(-kappa |x - y|) / (4 pi |x - y|) onto P_l:
//   g_l(r, r') = (1 / (2 r r')) int_{|r - r'|}^{r + r'} exp(-kappa rho) P_l(mu(rho)) d rho,
// with mu(rho) = (r^2 + r'^2 - rho^2) / (2 r r').
inline cplx partial_wave_green(cplx kappa, int l, double r, double rp) {
    std::vector<double> x, w;
    panel_rule(64, 24, std::abs(r - rp), r + rp, x, w);
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mu = (r * r + rp * rp - x[i] * x[i]) / (2.0 * r * rp);
        s += w[i] * std::exp(-kappa * x[i]) * legendre(l, mu);
    }
    return s / (2.0 * r * rp);
}

// int_{R^3} G_0(x - y) h(|y|) dy at |x| = r, in spherical coordinates centred
// at x: (1/2) int_0^S s int_{-1}^{1} h(sqrt(r^2 + s^2 + 2 r s mu)) d mu ds.
inline double newton_potential(const std::function<double(double)>& h, double r, double S) {
    std::vector<double> sx, sw, mx, mw;
    panel_rule(200, 12, 0.0, S, sx, sw);
    panel_rule(8, 16, -1.0, 1.0, mx, mw);
    double total = 0.0;
    for (std::size_t i = 0; i < sx.size(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < mx.size(); ++j)
            inner += mw[j] * h(std::sqrt(r * r + sx[i] * sx[i] + 2.0 * r * sx[i] * mx[j]));
        total += sw[i] * sx[i] * inner;
    }
    return 0.5 * total;
}

}  // namespace oracle
