#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectra_cert/spectral.hpp"

namespace spectra_cert {
namespace {

// Cell average of V over [a, b], split at the breakpoints it contains.
cplx cell_average(const Potential& V, double a, double b, std::span<const double> breakpoints) {
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    const Quadrature g = gauss_legendre(8, -1.0, 1.0);
    cplx s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        for (std::size_t k = 0; k < g.nodes.size(); ++k)
            s += 0.5 * (hi - lo) * g.weights[k] * V.radial_profile(0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[k]);
    }
    return s / (b - a);
}

bool contains_breakpoint(double a, double b, std::span<const double> breakpoints) {
    for (double p : breakpoints)
        if (p > a && p < b) return true;
    return false;
}

double row_sum_norm(const DenseComplexMatrix& M) {
    double best = 0.0;
    for (std::size_t i = 0; i < M.order(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < M.order(); ++j) s += std::abs(M(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

DiscretizedOperator discretize_radial(const Potential& V, int ell, double R, int n) {
    if (V.dimension() != 3) throw UnsupportedError("discretize_radial requires dimension 3");
    if (!V.is_radial()) throw UnsupportedError("discretize_radial requires a radial potential");
    if (n < 8) throw PreconditionError("discretize_radial: n must be >= 8");
    if (ell < 0) throw PreconditionError("discretize_radial: ell must be >= 0");
    if (!(R > 0.0)) throw PreconditionError("discretize_radial: R must be positive");

    DiscretizedOperator op;
    op.kind = OperatorKind::radial_sector;
    op.ell = ell;
    op.n = n;
    op.h = R / (n + 1);
    op.domain_radius = R;
    op.d = 3;
    op.V_ref = V;
    op.matrix = DenseComplexMatrix(n);
    op.diag.resize(n);
    op.off = -1.0 / (op.h * op.h);
    const auto bps = V.breakpoints();
    for (int j = 0; j < n; ++j) {
        const double r = (j + 1) * op.h;
        const double a = r - 0.5 * op.h, b = r + 0.5 * op.h;
        const cplx v = contains_breakpoint(a, b, bps) ? cell_average(V, a, b, bps) : V.radial_profile(r);
        op.diag[j] = 2.0 / (op.h * op.h) + double(ell) * (ell + 1) / (r * r) + v;
        op.matrix(j, j) = op.diag[j];
        if (j + 1 < n) op.matrix(j, j + 1) = op.matrix(j + 1, j) = op.off;
    }
    return op;
}

DiscretizedOperator discretize_box(const Potential& V, double L, int n) {
    if (V.dimension() != 3) throw UnsupportedError("discretize_box requires dimension 3");
    if (n > 20) throw PreconditionError("discretize_box: n^3 exceeds 20^3; use the radial mode for larger grids");
    if (n < 2 || n % 2 != 0) throw PreconditionError("discretize_box: n must be even and >= 2");
    if (!(L > 0.0)) throw PreconditionError("discretize_box: L must be positive");

    DiscretizedOperator op;
    op.kind = OperatorKind::box_3d;
    op.n = n;
    op.h = 2.0 * L / (n + 1);
    op.domain_radius = L;
    op.d = 3;
    op.V_ref = V;
    const std::size_t N = static_cast<std::size_t>(n) * n * n;
    op.matrix = DenseComplexMatrix(N);
    const double h2 = op.h * op.h;
    auto idx = [n](int i, int j, int k) { return (static_cast<std::size_t>(i) * n + j) * n + k; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x[3] = {-L + (i + 1) * op.h, -L + (j + 1) * op.h, -L + (k + 1) * op.h};
                const std::size_t p = idx(i, j, k);
                op.matrix(p, p) = 6.0 / h2 + V.eval(x);
                const int c[3] = {i, j, k};
                for (int axis = 0; axis < 3; ++axis)
                    for (int step : {-1, 1}) {
                        int q[3] = {c[0], c[1], c[2]};
                        q[axis] += step;
                        if (q[axis] < 0 || q[axis] >= n) continue;
                        op.matrix(p, idx(q[0], q[1], q[2])) = -1.0 / h2;
                    }
            }
    return op;
}

double distance_to_half_line(cplx lambda) {
    return lambda.real() >= 0.0 ? std::abs(lambda.imag()) : std::abs(lambda);
}

double continuum_floor(const DiscretizedOperator& op) {
    const Potential zero = catalog("zero", {}, 3);
    if (op.kind == OperatorKind::radial_sector) {
        const DiscretizedOperator free = discretize_radial(zero, op.ell, op.domain_radius, op.n);
        std::vector<double> diag(op.n), off(op.n - 1, free.off);
        for (int j = 0; j < op.n; ++j) diag[j] = free.diag[j].real();
        return eig_symmetric_tridiagonal(diag, off, false).values.front();
    }
    // The free box Laplacian separates: three times the lowest 1D Dirichlet value.
    std::vector<double> diag(op.n, 2.0 / (op.h * op.h)), off(op.n - 1, -1.0 / (op.h * op.h));
    return 3.0 * eig_symmetric_tridiagonal(diag, off, false).values.front();
}

SpectrumReport spectrum(const DiscretizedOperator& op, std::optional<double> outlier_tol) {
    SpectrumReport rep;
    rep.continuum_floor = continuum_floor(op);
    rep.outlier_tol = outlier_tol ? *outlier_tol : 10.0 * rep.continuum_floor;
    rep.matrix_norm = row_sum_norm(op.matrix);
    const auto pairs = eig_complex(op.matrix);
    const std::size_t N = op.matrix.order();
    std::vector<cplx> Mv(N);
    for (const EigenPair& p : pairs) {
        if (op.kind == OperatorKind::radial_sector) {
            for (std::size_t j = 0; j < N; ++j) {
                cplx s = op.diag[j] * p.vector[j];
                if (j > 0) s += op.off * p.vector[j - 1];
                if (j + 1 < N) s += op.off * p.vector[j + 1];
                Mv[j] = s;
            }
        } else {
            op.matrix.apply(p.vector.data(), Mv.data());
        }
        double res = 0.0, vn = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            res += std::norm(Mv[j] - p.value * p.vector[j]);
            vn += std::norm(p.vector[j]);
        }
        if (distance_to_half_line(p.value) > rep.outlier_tol) rep.outliers.push_back(rep.eigenvalues.size());
        rep.eigenvalues.push_back(p.value);
        rep.residuals.push_back(std::sqrt(res / vn));
        rep.eigenvectors.push_back(p.vector);
    }
    return rep;
}

Pseudospectrum pseudospectrum(const DiscretizedOperator& op, double re0, double re1, double im0, double im1,
                              int n_re, int n_im, std::span<const double> levels) {
    if (n_re < 1 || n_im < 1) throw PreconditionError("pseudospectrum: grid must be nonempty");
    Pseudospectrum out;
    out.field.resize(static_cast<std::size_t>(n_re) * n_im);
    auto coord = [](double a, double b, int m, int i) { return m == 1 ? a : a + (b - a) * i / (m - 1); };
    parallel_for(out.field.size(), [&](std::size_t flat) {
        const int i = static_cast<int>(flat / n_im), j = static_cast<int>(flat % n_im);
        const cplx z(coord(re0, re1, n_re, i), coord(im0, im1, n_im, j));
        DenseComplexMatrix M = op.matrix;
        for (std::size_t k = 0; k < M.order(); ++k) M(k, k) -= z;
        const SmallestSingularValue s = smallest_singular_value(M);
        out.field[flat] = {z, s.value};
    });
    for (double level : levels) {
        std::size_t inside = 0;
        for (const auto& p : out.field) inside += p.sigma_min < level;
        out.level_fractions.emplace_back(level, double(inside) / out.field.size());
    }
    return out;
}

SmoothProfile bump_profile() {
    SmoothProfile p;
    p.f = [](double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
    p.df = [](double r) {
        if (r >= 1.0) return 0.0;
        const double s = 1.0 - r * r;
        return std::exp(-1.0 / s) * (-2.0 * r / (s * s));
    };
    p.d2f = [](double r) {
        if (r >= 1.0) return 0.0;
        const double s = 1.0 - r * r;
        const double g1 = -2.0 * r / (s * s);
        const double g2 = -2.0 / (s * s) - 8.0 * r * r / (s * s * s);
        return std::exp(-1.0 / s) * (g1 * g1 + g2);
    };
    p.support = 1.0;
    return p;
}

SingularSequenceTable singular_sequence_decay(const SmoothProfile& phi1, int d, std::span<const double> k,
                                              std::span<const int> n_list, double a) {
    if (d < 3) throw PreconditionError("singular_sequence_decay: dimension must be >= 3");
    if (static_cast<int>(k.size()) != d) throw PreconditionError("singular_sequence_decay: k has wrong dimension");
    const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    const Quadrature q = composite_gauss_legendre(200, 10, 0.0, phi1.support);
    double nf = 0.0, ng = 0.0, nl = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double r = q.nodes[i], w = q.weights[i] * omega * std::pow(r, d - 1);
        const double f = phi1.f(r), df = phi1.df(r);
        const double lap = phi1.d2f(r) + (d - 1) / r * df;
        nf += w * f * f;
        ng += w * df * df;
        nl += w * lap * lap;
    }
    SingularSequenceTable out;
    if (std::abs(nf - 1.0) > 1e-12) out.normalized = true;
    const double scale = 1.0 / std::sqrt(nf);
    const double grad1 = std::sqrt(ng) * scale, lap1 = std::sqrt(nl) * scale;
    double kn = 0.0;
    for (double v : k) kn += v * v;
    kn = std::sqrt(kn);
    std::vector<double> ns, res, pot;
    for (int n : n_list) {
        if (n < 1) throw PreconditionError("singular_sequence_decay: n must be >= 1");
        SingularSequenceRow row;
        row.n = n;
        row.grad_norm = grad1 / n;
        row.lap_norm = lap1 / (double(n) * n);
        row.residual = row.lap_norm + 2.0 * kn * row.grad_norm;
        row.potential_term = a * row.grad_norm * row.grad_norm;
        out.rows.push_back(row);
        ns.push_back(n);
        res.push_back(row.residual);
        pot.push_back(row.potential_term);
    }
    out.expected_residual_slope = kn > 0.0 ? -1.0 : -2.0;
    if (ns.size() >= 2) {
        out.residual_slope = loglog_slope(ns, res);
        if (a > 0.0) out.potential_slope = loglog_slope(ns, pot);
    }
    return out;
}

}  // namespace spectra_cert
