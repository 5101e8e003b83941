#include <Eigen/Dense>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spectra_cert/bs.hpp"
#include "spectra_cert/conditions.hpp"

namespace spectra_cert {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool on_open_positive_axis(cplx z) { return z.imag() == 0.0 && z.real() > 0.0; }

// Scaled modified spherical Bessel factors at x = kappa r, l = 0..L. Kh[l] is
// the polynomial part of the decaying solution (Kh[0] = 1, Kh[1] = 1 + x) and
// Ih[l] the matching regular factor, so that for r < r'
//   g_l(r, r') = (r / r')^l Ih[l](kappa r) Kh[l](kappa r') exp(-kappa (r' - r)) / r'.
// Kh follows the upward recurrence; Ih comes from the Wronskian together with
// the continued fraction for the ratio of consecutive regular solutions.
void sector_factors(cplx x, int L, cplx* Kh, cplx* Ih) {
    std::vector<cplx> K(L + 2);
    K[0] = 1.0;
    K[1] = 1.0 + x;
    const cplx x2 = x * x;
    for (int l = 1; l <= L; ++l) K[l + 1] = x2 * K[l - 1] + double(2 * l + 1) * K[l];
    const int M = L + static_cast<int>(2.0 * std::abs(x)) + 50;
    std::vector<cplx> rho(L + 1);
    cplx r = 0.0;
    for (int l = M - 1; l >= 0; --l) {
        r = 1.0 / (double(2 * l + 3) + x2 * r);
        if (l <= L) rho[l] = r;
    }
    for (int l = 0; l <= L; ++l) {
        Kh[l] = K[l];
        Ih[l] = 1.0 / (K[l + 1] + x2 * rho[l] * K[l]);
    }
}

void require_bs_input(const Potential& V, cplx z, const char* op) {
    if (V.dimension() != 3) throw UnsupportedError(std::string(op) + " requires dimension 3");
    if (!V.is_radial()) throw UnsupportedError(std::string(op) + " requires a radial potential");
    if (on_open_positive_axis(z)) throw PreconditionError(std::string(op) + ": z on the open positive axis");
}

// sum_{l > L} 1 / (l (2l + 1)); the full series from l = 1 is 2 - 2 ln 2.
double hs_tail_coefficient(int L) {
    double s = 2.0 - 2.0 * std::log(2.0);
    for (int l = 1; l <= L; ++l) s -= 1.0 / (double(l) * (2.0 * l + 1.0));
    return std::max(s, 0.0);
}

}  // namespace

GreenParams green_params(cplx z) { return {z, std::sqrt(-z)}; }

cplx green_function(cplx z, double s) {
    if (!(s > 0.0)) throw PreconditionError("green_function: distance must be positive");
    const cplx kappa = green_params(z).kappa;
    return std::exp(-kappa * s) / (4.0 * kPi * s);
}

bool pointwise_bound_check(cplx z, std::span<const double> samples) {
    if (on_open_positive_axis(z)) throw PreconditionError("pointwise_bound_check: z on the open positive axis");
    const double re_kappa = green_params(z).kappa.real();
    if (!(re_kappa >= 0.0)) return false;
    for (double s : samples) {
        if (!(s > 0.0)) throw PreconditionError("pointwise_bound_check: distance must be positive");
        const double mod = std::exp(-re_kappa * s) / (4.0 * kPi * s);
        if (!(mod <= 1.0 / (4.0 * kPi * s))) return false;
    }
    return true;
}

std::vector<cplx> partial_wave_green(cplx z, int ell_max, double r, double rp) {
    if (!(r > 0.0 && rp > 0.0)) throw PreconditionError("partial_wave_green: radii must be positive");
    if (ell_max < 0) throw PreconditionError("partial_wave_green: ell_max must be >= 0");
    const cplx kappa = green_params(z).kappa;
    const double lo = std::min(r, rp), hi = std::max(r, rp);
    std::vector<cplx> Klo(ell_max + 1), Ilo(ell_max + 1), Khi(ell_max + 1), Ihi(ell_max + 1);
    sector_factors(kappa * lo, ell_max, Klo.data(), Ilo.data());
    sector_factors(kappa * hi, ell_max, Khi.data(), Ihi.data());
    const cplx e = std::exp(-kappa * (hi - lo)) / hi;
    std::vector<cplx> g(ell_max + 1);
    double q = 1.0;
    for (int l = 0; l <= ell_max; ++l) {
        g[l] = q * e * Ilo[l] * Khi[l];
        q *= lo / hi;
    }
    return g;
}

BSMatrix assemble_bs(const Potential& V, cplx z, const RadialGrid& grid, int ell_max, bool keep_matrices) {
    require_bs_input(V, z, "assemble_bs");
    if (ell_max < 0) throw PreconditionError("assemble_bs: ell_max must be >= 0");
    const std::size_t n = grid.size();
    if (n == 0) throw PreconditionError("assemble_bs: empty grid");

    BSMatrix out;
    out.z = z;
    out.grid = grid;
    out.ell_max = ell_max;
    out.per_ell_norms.assign(ell_max + 1, 0.0);

    const cplx kappa = green_params(z).kappa;
    const int L = ell_max;
    std::vector<double> left(n);
    std::vector<cplx> right(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = grid.nodes[j], sw = std::sqrt(grid.weights[j]);
        const cplx v = V.radial_profile(r);
        const double root = std::sqrt(std::abs(v));
        left[j] = sw * root * r;
        right[j] = sw * root * complex_signum(v) * r;
    }

    std::vector<cplx> Kh(n * (L + 1)), Ih(n * (L + 1));
    for (std::size_t j = 0; j < n; ++j) sector_factors(kappa * grid.nodes[j], L, &Kh[j * (L + 1)], &Ih[j * (L + 1)]);

    // Lower triangle (row = larger radius) of exp(-kappa (r_> - r_<)) / r_>,
    // r_< / r_> and its running power.
    std::vector<cplx> E(n * n);
    std::vector<double> q(n * n), P(n * n, 1.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k <= j; ++k) {
            const double rj = grid.nodes[j], rk = grid.nodes[k];
            E[j * n + k] = std::exp(-kappa * (rj - rk)) / rj;
            q[j * n + k] = rk / rj;
        }

    double hs_sq = 0.0;
    DenseComplexMatrix A(n);
    for (int l = 0; l <= L; ++l) {
        for (std::size_t j = 0; j < n; ++j) {
            const cplx K_hi = Kh[j * (L + 1) + l];
            for (std::size_t k = 0; k <= j; ++k) {
                const cplx g = P[j * n + k] * E[j * n + k] * Ih[k * (L + 1) + l] * K_hi;
                A(j, k) = left[j] * g * right[k];
                if (k != j) A(k, j) = left[k] * g * right[j];
            }
        }
        for (std::size_t i = 0; i < n * n; ++i) P[i] *= q[i];
        const double fro = A.frobenius_norm();
        hs_sq += (2.0 * l + 1.0) * fro * fro;
        out.per_ell_norms[l] = fro == 0.0 ? 0.0 : largest_singular_value(A);
        if (keep_matrices) out.matrices.push_back(A);
    }
    out.norm = *std::max_element(out.per_ell_norms.begin(), out.per_ell_norms.end());
    out.hs_norm = std::sqrt(hs_sq);
    if (L >= 1) out.tail_warning = out.per_ell_norms[L] > 0.0 && out.per_ell_norms[L] >= out.per_ell_norms[L - 1];
    return out;
}

BSNormScan bs_norm_scan(const Potential& V, std::span<const cplx> z_list, const RadialGrid& grid, int ell_max,
                        double slack) {
    BSNormScan scan;
    scan.slack = slack;
    const BSMatrix zero = assemble_bs(V, 0.0, grid, ell_max);
    scan.norm_zero = zero.norm;
    scan.tail_warning = zero.tail_warning;
    for (cplx z : z_list) {
        const BSMatrix m = assemble_bs(V, z, grid, ell_max);
        scan.norms.emplace_back(z, m.norm);
        scan.tail_warning = scan.tail_warning || m.tail_warning;
        if (!(m.norm <= scan.norm_zero * (1.0 + slack))) scan.bound_holds = false;
    }
    return scan;
}

HSResult hs_norm(const Potential& V, const RadialGrid& grid, int ell_max) {
    require_bs_input(V, 0.0, "hs_norm");
    HSResult res;
    const Constant rollnik = rollnik_norm(V);
    if (rollnik.divergent) {
        res.direct = res.rollnik_over_4pi = kInf;
        res.divergent = true;
        res.relative_gap = 0.0;
        return res;
    }
    res.rollnik_over_4pi = rollnik.value / (4.0 * kPi);
    const BSMatrix m = assemble_bs(V, 0.0, grid, ell_max);
    const auto bps = V.breakpoints();
    const double moment =
        integrate_log_mapped([&](double r) { return std::norm(V.radial_profile(r)) * r * r * r; },
                             1e-12 * grid.r_max, grid.r_max, bps);
    res.direct = std::sqrt(m.hs_norm * m.hs_norm + hs_tail_coefficient(ell_max) * moment);
    res.relative_gap =
        res.rollnik_over_4pi == 0.0 ? std::abs(res.direct) : std::abs(res.direct - res.rollnik_over_4pi) / res.rollnik_over_4pi;
    return res;
}

HSResult hs_norm(const Potential& V) {
    const double R = V.effective_radius();
    if (!std::isfinite(R)) return hs_norm(V, RadialGrid::uniform(800, 40.0));
    return hs_norm(V, RadialGrid::uniform(800, R));
}

double bs_principle_matrix_check(const DenseComplexMatrix& H0, std::span<const cplx> Vdiag, cplx lambda,
                                 std::span<const cplx> psi) {
    const std::size_t n = H0.order();
    if (Vdiag.size() != n || psi.size() != n)
        throw PreconditionError("bs_principle_matrix_check: dimension mismatch");

    double vmax = 0.0, psi_norm = 0.0;
    for (cplx v : Vdiag) vmax = std::max(vmax, std::abs(v));
    for (cplx p : psi) psi_norm += std::norm(p);
    psi_norm = std::sqrt(psi_norm);
    if (psi_norm == 0.0) throw PreconditionError("bs_principle_matrix_check: psi is zero");

    std::vector<cplx> Hpsi = H0.apply(std::vector<cplx>(psi.begin(), psi.end()));
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(Hpsi[i] + Vdiag[i] * psi[i] - lambda * psi[i]);
    const double scale = H0.frobenius_norm() + vmax + std::abs(lambda);
    if (std::sqrt(res) > 1e-8 * scale * psi_norm)
        throw PreconditionError("bs_principle_matrix_check: (lambda, psi) is not an eigenpair of H0 + V");

    for (const EigenPair& p : eig_complex(H0))
        if (std::abs(p.value - lambda) <= 1e-8)
            throw PreconditionError("bs_principle_matrix_check: lambda within 1e-8 of the spectrum of H0");

    Eigen::MatrixXcd M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = H0(i, j) - (i == j ? lambda : cplx{0.0});
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);

    Eigen::VectorXcd phi(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double root = std::sqrt(std::abs(Vdiag[i]));
        phi(i) = root * psi[i];
        rhs(i) = root * complex_signum(Vdiag[i]) * phi(i);
    }
    const double phi_norm = phi.norm();
    if (phi_norm == 0.0) throw PreconditionError("bs_principle_matrix_check: |V|^(1/2) psi vanishes");
    const Eigen::VectorXcd y = lu.solve(rhs);
    Eigen::VectorXcd Kphi(n);
    for (std::size_t i = 0; i < n; ++i) Kphi(i) = std::sqrt(std::abs(Vdiag[i])) * y(i);
    return (Kphi + phi).norm() / phi_norm;
}

KappaScaling kappa_scaling(cplx lambda, std::span<const double> eps_list) {
    KappaScaling out;
    if (lambda == cplx{0.0}) {
        out.regime = KappaRegime::threshold;
        out.expected_exponent = 0.5;
    } else if (lambda.imag() == 0.0 && lambda.real() > 0.0) {
        out.regime = KappaRegime::positive_axis;
        out.expected_exponent = 1.0;
    } else {
        out.regime = KappaRegime::generic;
        out.expected_exponent = 0.0;
    }
    std::vector<double> abs_eps;
    for (double e : eps_list) {
        if (e == 0.0) throw PreconditionError("kappa_scaling: eps must be nonzero");
        out.eps.push_back(e);
        out.kappa.push_back(std::sqrt(-(lambda + cplx(0.0, e))).real());
        abs_eps.push_back(std::abs(e));
    }
    if (out.eps.size() >= 2) {
        out.fitted_slope = loglog_slope(abs_eps, out.kappa);
        out.slope_matches = std::abs(out.fitted_slope - out.expected_exponent) <= 0.05;
    }
    return out;
}

MEpsCheck m_eps_hs_check(const Potential& V, double omega_radius, cplx lambda, std::span<const double> eps_list) {
    if (V.dimension() != 3) throw UnsupportedError("m_eps_hs_check requires dimension 3");
    if (!(omega_radius > 0.0)) throw PreconditionError("m_eps_hs_check: radius must be positive");
    if (V.origin_singularity_order() >= 3.0)
        throw PreconditionError("m_eps_hs_check: |V| is not integrable on the ball");

    std::vector<double> bps;
    for (double b : V.breakpoints())
        if (b < omega_radius) bps.push_back(b);
    const double l1 = 4.0 * kPi *
                      integrate_log_mapped([&](double r) { return V.abs(r) * r * r; }, 1e-14 * omega_radius,
                                           omega_radius, bps);
    if (!std::isfinite(l1)) throw PreconditionError("m_eps_hs_check: integral of |V| over the ball diverges");

    // Radial nodes for x in the ball.
    std::vector<double> cuts{0.0};
    for (double b : bps) cuts.push_back(b);
    cuts.push_back(omega_radius);
    Quadrature xq;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Quadrature piece = composite_gauss_legendre(40, 10, cuts[i], cuts[i + 1]);
        xq.nodes.insert(xq.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        xq.weights.insert(xq.weights.end(), piece.weights.begin(), piece.weights.end());
    }

    const KappaScaling ks = kappa_scaling(lambda, eps_list);
    MEpsCheck out;
    out.regime = ks.regime;
    out.expected_slope = 1.0 - 0.5 * ks.expected_exponent;
    std::vector<double> abs_eps, scaled;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const cplx z = lambda + cplx(0.0, eps_list[i]);
        const double kap = ks.kappa[i];
        if (!(kap > 0.0)) throw PreconditionError("m_eps_hs_check: Re kappa vanishes");
        // int_{R^3} |G_z(x - y)|^2 dy, by quadrature in the distance s.
        const double S = 60.0 / kap;
        const Quadrature sq = composite_gauss_legendre(200, 10, 0.0, S);
        double inner = 0.0;
        for (std::size_t k = 0; k < sq.nodes.size(); ++k) {
            const double s = sq.nodes[k];
            inner += sq.weights[k] * 4.0 * kPi * s * s * std::norm(green_function(z, s));
        }
        double direct_sq = 0.0;
        for (std::size_t j = 0; j < xq.nodes.size(); ++j) {
            const double r = xq.nodes[j];
            direct_sq += xq.weights[j] * 4.0 * kPi * r * r * V.abs(r) * inner;
        }
        MEpsRow row;
        row.eps = eps_list[i];
        row.hs_direct = std::sqrt(direct_sq);
        row.hs_formula = std::sqrt(l1 / (4.0 * kPi * kap));
        row.relative_gap = std::abs(row.hs_direct - row.hs_formula) / row.hs_formula;
        out.rows.push_back(row);
        abs_eps.push_back(std::abs(eps_list[i]));
        scaled.push_back(std::abs(eps_list[i]) * row.hs_formula);
    }
    if (abs_eps.size() >= 2) {
        out.fitted_slope = loglog_slope(abs_eps, scaled);
        out.slope_matches = std::abs(out.fitted_slope - out.expected_slope) <= 0.05;
    }
    return out;
}

}  // namespace spectra_cert
