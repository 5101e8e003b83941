#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spectra_cert/numerics.hpp"

namespace spectra_cert {

Quadrature gauss_legendre(int n, double a, double b) {
    if (n < 1) throw PreconditionError("gauss_legendre: n must be >= 1, got " + std::to_string(n));
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw PreconditionError("gauss_legendre: invalid interval");

    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[i] = mid - half * x;
        q.nodes[n - 1 - i] = mid + half * x;
        q.weights[i] = q.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) q.nodes[n / 2] = mid;
    return q;
}

Quadrature composite_gauss_legendre(int panels, int order, double a, double b) {
    if (panels < 1) throw PreconditionError("composite_gauss_legendre: panels must be >= 1");
    const Quadrature ref = gauss_legendre(order, -1.0, 1.0);
    Quadrature q;
    q.nodes.reserve(static_cast<std::size_t>(panels) * order);
    q.weights.reserve(q.nodes.capacity());
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < order; ++i) {
            q.nodes.push_back(lo + 0.5 * h * (ref.nodes[i] + 1.0));
            q.weights.push_back(0.5 * h * ref.weights[i]);
        }
    }
    return q;
}

double integrate_log_mapped(const std::function<double(double)>& f, double a, double b,
                            std::span<const double> breakpoints) {
    if (!(a > 0.0) || !(a < b)) throw PreconditionError("integrate_log_mapped: need 0 < a < b");
    std::vector<double> cuts{std::log(a)};
    for (double bp : breakpoints)
        if (bp > a && bp < b) cuts.push_back(std::log(bp));
    cuts.push_back(std::log(b));
    const Quadrature ref = gauss_legendre(20, -1.0, 1.0);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double u0 = cuts[s], u1 = cuts[s + 1];
        const int panels = std::max(1, static_cast<int>(std::ceil((u1 - u0) / 0.25)));
        const double h = (u1 - u0) / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = u0 + p * h;
            for (int i = 0; i < 20; ++i) {
                const double u = lo + 0.5 * h * (ref.nodes[i] + 1.0);
                const double r = std::exp(u);
                total += 0.5 * h * ref.weights[i] * f(r) * r;
            }
        }
    }
    return total;
}

RadialGrid RadialGrid::uniform(int n, double r_max) {
    if (n < 1 || !(r_max > 0.0)) throw PreconditionError("RadialGrid::uniform: need n >= 1, r_max > 0");
    RadialGrid g;
    g.r_max = r_max;
    g.grading = Grading::uniform;
    g.gamma = 1.0;
    g.nodes.resize(n);
    g.weights.assign(n, r_max / n);
    for (int j = 1; j <= n; ++j) g.nodes[j - 1] = r_max * j / n;
    g.weights.back() *= 0.5;
    return g;
}

RadialGrid RadialGrid::graded(int n, double r_max, double gamma) {
    if (n < 1 || !(r_max > 0.0) || !(gamma >= 1.0))
        throw PreconditionError("RadialGrid::graded: need n >= 1, r_max > 0, gamma >= 1");
    RadialGrid g;
    g.r_max = r_max;
    g.grading = Grading::graded;
    g.gamma = gamma;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int j = 1; j <= n; ++j) {
        const double t = static_cast<double>(j) / n;
        g.nodes[j - 1] = r_max * std::pow(t, gamma);
        g.weights[j - 1] = r_max * gamma * std::pow(t, gamma - 1.0) / n;
    }
    g.weights.back() *= 0.5;
    return g;
}

BoxGrid BoxGrid::make(int dimension, int n, double L) {
    if (dimension < 1) throw PreconditionError("BoxGrid: dimension must be positive");
    if (n < 2 || n % 2 != 0) throw PreconditionError("BoxGrid: n per axis must be even and >= 2");
    if (!(L > 0.0)) throw PreconditionError("BoxGrid: half-width must be positive");
    BoxGrid g;
    g.dimension = dimension;
    g.n = n;
    g.L = L;
    Quadrature q = gauss_legendre(n, -L, L);
    g.nodes = std::move(q.nodes);
    g.weights = std::move(q.weights);
    return g;
}

std::size_t BoxGrid::cardinality() const {
    std::size_t c = 1;
    for (int k = 0; k < dimension; ++k) c *= static_cast<std::size_t>(n);
    return c;
}

double BoxGrid::point(std::size_t flat, double* x) const {
    double w = 1.0;
    for (int k = dimension - 1; k >= 0; --k) {
        const std::size_t i = flat % n;
        flat /= n;
        x[k] = nodes[i];
        w *= weights[i];
    }
    return w;
}

}  // namespace spectra_cert
