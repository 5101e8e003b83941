#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "spectra_cert/errors.hpp"

namespace spectra_cert {

using cplx = std::complex<double>;

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b]; exact for degree <= 2n-1.
Quadrature gauss_legendre(int n, double a, double b);

// `panels` equal panels on [a, b], each with an `order`-point Gauss rule.
Quadrature composite_gauss_legendre(int panels, int order, double a, double b);

// Integral of f over [a, b] (0 < a) in the variable u = ln r, split at the
// given breakpoints. Used for half-line radial integrals with power-law
// behaviour at the origin.
double integrate_log_mapped(const std::function<double(double)>& f, double a, double b,
                            std::span<const double> breakpoints = {});

enum class Grading { uniform, graded };

// Nodes r_j = r_max * (j/n)^gamma, j = 1..n, with trapezoid weights in the
// uniform variable t = j/n (the r = 0 endpoint carries no node).
struct RadialGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double r_max = 0.0;
    Grading grading = Grading::uniform;
    double gamma = 1.0;

    static RadialGrid uniform(int n, double r_max);
    static RadialGrid graded(int n, double r_max, double gamma = 2.0);
    std::size_t size() const { return nodes.size(); }
};

// Tensor-product Gauss-Legendre grid on [-L, L]^d. n must be even so that no
// node sits at the origin.
struct BoxGrid {
    int dimension = 3;
    int n = 0;
    double L = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    static BoxGrid make(int dimension, int n, double L);
    std::size_t cardinality() const;
    // Coordinates and weight of the point with the given flat index.
    double point(std::size_t flat, double* x) const;
};

class DenseComplexMatrix {
public:
    DenseComplexMatrix() = default;
    explicit DenseComplexMatrix(std::size_t n);
    DenseComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static DenseComplexMatrix identity(std::size_t n);

    std::size_t order() const { return n_; }
    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    void apply(const cplx* x, cplx* y) const;
    void apply_adjoint(const cplx* x, cplx* y) const;
    std::vector<cplx> apply(const std::vector<cplx>& x) const;

    DenseComplexMatrix adjoint() const;
    double frobenius_norm() const;
    bool all_finite() const;
    bool is_real_symmetric() const;

private:
    std::size_t n_ = 0;
    std::vector<cplx> data_;
};

struct EigenPair {
    cplx value;
    std::vector<cplx> vector;
};

// Full eigendecomposition (Hessenberg reduction + shifted QR). Pairs are sorted
// by (Re, Im); eigenvectors have unit norm and a real positive largest entry.
std::vector<EigenPair> eig_complex(const DenseComplexMatrix& M);

struct TridiagonalEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  // empty unless requested
};

// Real symmetric tridiagonal eigenproblem; values ascending.
TridiagonalEigen eig_symmetric_tridiagonal(const std::vector<double>& diag,
                                           const std::vector<double>& off, bool want_vectors);

double largest_singular_value(const DenseComplexMatrix& M);

struct SmallestSingularValue {
    double value = 0.0;
    bool singular = false;
};

SmallestSingularValue smallest_singular_value(const DenseComplexMatrix& M);

// Largest eigenvalue of a Hermitian positive semidefinite operator given by
// its action, via Lanczos with full reorthogonalization and restarts.
double hermitian_top_eigenvalue(std::size_t n,
                                const std::function<void(const cplx*, cplx*)>& apply,
                                double rel_tol = 1e-13);

// Bisection for f increasing with f(lo) < 0 < f(hi).
double find_root_increasing(const std::function<double(double)>& f, double lo, double hi);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Extrapolates v(n) = A - C / (ln n + delta)^2 through three (n, v) pairs,
// solving for delta by bisection, and returns A. Suited to quantities whose
// discretization error decays like an inverse power of log n.
double log_richardson(std::span<const int> ns, std::span<const double> values);

// Parallelism cap from SPECTRA_CERT_THREADS (default: hardware concurrency).
int thread_cap();

// Runs body(i) for i in [0, count); the first exception by index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace spectra_cert
