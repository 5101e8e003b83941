#pragma once

#include <optional>
#include <vector>

#include "spectra_cert/numerics.hpp"
#include "spectra_cert/potential.hpp"

namespace spectra_cert {

enum class OperatorKind { radial_sector, box_3d };

// Finite-difference H_V with Dirichlet boundary conditions.
struct DiscretizedOperator {
    OperatorKind kind = OperatorKind::radial_sector;
    int ell = 0;
    int n = 0;  // interior points (radial) or points per axis (box)
    double h = 0.0;
    double domain_radius = 0.0;  // R (radial) or L (box)
    int d = 3;
    Potential V_ref;
    DenseComplexMatrix matrix;
    // Radial sectors only: the tridiagonal structure of `matrix`.
    std::vector<cplx> diag;
    double off = 0.0;
};

// -u'' + (l(l+1)/r^2 + V) u on r_j = j h, h = R/(n+1), j = 1..n. V is sampled at
// the nodes, and averaged over [r_j - h/2, r_j + h/2] in cells that contain a
// breakpoint of V.
DiscretizedOperator discretize_radial(const Potential& V, int ell, double R, int n);

// 7-point Laplacian plus V on [-L, L]^3 with nodes -L + (i+1) h, h = 2L/(n+1),
// n even (no node at the origin), n <= 20.
DiscretizedOperator discretize_box(const Potential& V, double L, int n);

struct SpectrumReport {
    std::vector<cplx> eigenvalues;
    std::vector<double> residuals;
    std::vector<std::size_t> outliers;  // indices into eigenvalues
    std::vector<std::vector<cplx>> eigenvectors;
    double continuum_floor = 0.0;
    double outlier_tol = 0.0;
    double matrix_norm = 0.0;  // max absolute row sum
};

// Distance from lambda to [0, +inf).
double distance_to_half_line(cplx lambda);

// Smallest eigenvalue of the V = 0 operator with the same geometry.
double continuum_floor(const DiscretizedOperator& op);

// Full spectrum; outliers are eigenvalues farther than outlier_tol from
// [0, +inf). The default tolerance is 10 * continuum_floor.
SpectrumReport spectrum(const DiscretizedOperator& op, std::optional<double> outlier_tol = std::nullopt);

struct PseudospectrumPoint {
    cplx z;
    double sigma_min = 0.0;
};

struct Pseudospectrum {
    std::vector<PseudospectrumPoint> field;
    // For each level, the fraction of grid points with sigma_min < level.
    std::vector<std::pair<double, double>> level_fractions;
};

// sigma_min(M - z) on an n_re x n_im rectangle [re0, re1] x [im0, im1].
Pseudospectrum pseudospectrum(const DiscretizedOperator& op, double re0, double re1, double im0, double im1,
                              int n_re, int n_im, std::span<const double> levels);

// Radial profile with first and second derivatives, supported in the unit ball.
struct SmoothProfile {
    std::function<double(double)> f, df, d2f;
    double support = 1.0;
};

// exp(-1 / (1 - r^2)) for r < 1.
SmoothProfile bump_profile();

struct SingularSequenceRow {
    int n = 0;
    double grad_norm = 0.0;
    double lap_norm = 0.0;
    double residual = 0.0;
    double potential_term = 0.0;
};

struct SingularSequenceTable {
    std::vector<SingularSequenceRow> rows;
    double residual_slope = 0.0;
    double potential_slope = 0.0;
    double expected_residual_slope = 0.0;
    // Set when the profile had to be normalized.
    bool normalized = false;
};

// phi_n(x) = n^(-d/2) phi_1(x/n) e^(i k.x): ||grad phi_n|| = ||grad phi_1|| / n,
// ||Lap phi_n|| = ||Lap phi_1|| / n^2, R(n) = ||Lap phi_n|| + 2|k| ||grad phi_n||,
// P(n) = a ||grad phi_n||^2.
SingularSequenceTable singular_sequence_decay(const SmoothProfile& phi1, int d, std::span<const double> k,
                                              std::span<const int> n_list, double a);

}  // namespace spectra_cert
