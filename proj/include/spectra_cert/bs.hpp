#pragma once

#include <span>
#include <vector>

#include "spectra_cert/numerics.hpp"
#include "spectra_cert/potential.hpp"

namespace spectra_cert {

// Spectral parameter z and kappa = sqrt(-z) on the principal branch
// (Re kappa >= 0, with Re kappa > 0 off [0, +inf)).
struct GreenParams {
    cplx z;
    cplx kappa;
};

GreenParams green_params(cplx z);

// Resolvent kernel of the free Laplacian in R^3 at distance s > 0:
// exp(-kappa s) / (4 pi s).
cplx green_function(cplx z, double s);

// |G_z(s)| <= G_0(s) for every sample. z on the open positive axis is rejected.
bool pointwise_bound_check(cplx z, std::span<const double> samples);

// Radial kernels g_l of the expansion
//   G_z(x, y) = sum_l (2l+1)/(4 pi) g_l(|x|, |y|) P_l(cos angle(x, y)),
// for l = 0..ell_max. At z = 0, g_l = r_<^l / ((2l+1) r_>^(l+1)).
std::vector<cplx> partial_wave_green(cplx z, int ell_max, double r, double rp);

// Nystrom discretization of |V|^(1/2) (H_0 - z)^(-1) V_(1/2) restricted to the
// partial-wave sectors l <= ell_max. The sector-l matrix is
//   A_l[j][k] = sqrt(w_j) |V_j|^(1/2) r_j g_l(r_j, r_k) r_k V_(1/2),k sqrt(w_k),
// which acts on sqrt(w) r f for f in that sector; each sector occurs with
// multiplicity 2l+1.
struct BSMatrix {
    cplx z;
    RadialGrid grid;
    int ell_max = 0;
    std::vector<double> per_ell_norms;
    double norm = 0.0;
    // sqrt(sum_l (2l+1) ||A_l||_F^2), truncated at ell_max.
    double hs_norm = 0.0;
    // Set when the last two sector norms are not decreasing.
    bool tail_warning = false;
    // Sector matrices, kept only on request.
    std::vector<DenseComplexMatrix> matrices;
};

BSMatrix assemble_bs(const Potential& V, cplx z, const RadialGrid& grid, int ell_max = 32,
                     bool keep_matrices = false);

struct BSNormScan {
    double norm_zero = 0.0;
    std::vector<std::pair<cplx, double>> norms;
    bool tail_warning = false;
    // norm(z) <= norm(0) (1 + slack) for every z in the list.
    bool bound_holds = true;
    double slack = 0.02;
};

BSNormScan bs_norm_scan(const Potential& V, std::span<const cplx> z_list, const RadialGrid& grid,
                        int ell_max = 32, double slack = 0.02);

struct HSResult {
    // Partial-wave Frobenius norm with the large-l tail added analytically.
    double direct = 0.0;
    // Rollnik norm divided by 4 pi.
    double rollnik_over_4pi = 0.0;
    double relative_gap = 0.0;
    bool divergent = false;
};

// Hilbert-Schmidt norm of the z = 0 operator, two ways. The default grid is
// uniform with 800 nodes on [0, effective radius].
HSResult hs_norm(const Potential& V, const RadialGrid& grid, int ell_max = 32);
HSResult hs_norm(const Potential& V);

// ||K_lambda phi + phi|| / ||phi|| with phi = |V|^(1/2) psi and
// K_lambda = |V|^(1/2) (H0 - lambda)^(-1) V_(1/2).
double bs_principle_matrix_check(const DenseComplexMatrix& H0, std::span<const cplx> Vdiag, cplx lambda,
                                 std::span<const cplx> psi);

enum class KappaRegime { threshold, positive_axis, generic };

struct KappaScaling {
    KappaRegime regime = KappaRegime::generic;
    double expected_exponent = 0.0;
    std::vector<double> eps;
    std::vector<double> kappa;
    double fitted_slope = 0.0;
    bool slope_matches = false;
};

// kappa(eps) = Re sqrt(-(lambda + i eps)) and its log-log slope in |eps|.
KappaScaling kappa_scaling(cplx lambda, std::span<const double> eps_list);

struct MEpsRow {
    double eps = 0.0;
    double hs_direct = 0.0;
    double hs_formula = 0.0;
    double relative_gap = 0.0;
};

struct MEpsCheck {
    std::vector<MEpsRow> rows;
    KappaRegime regime = KappaRegime::generic;
    // Slope of eps * hs_formula against eps, and the value the kappa regime
    // predicts (1 - exponent / 2).
    double fitted_slope = 0.0;
    double expected_slope = 0.0;
    bool slope_matches = false;
};

// Hilbert-Schmidt norm of chi_Omega |V|^(1/2) G_(lambda + i eps) on the ball of
// the given radius, by quadrature and by sqrt(int_Omega |V| / (4 pi kappa)).
MEpsCheck m_eps_hs_check(const Potential& V, double omega_radius, cplx lambda, std::span<const double> eps_list);

}  // namespace spectra_cert
