#include <Eigen/Dense>
#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <random>

#include "spectra_cert/numerics.hpp"
#include "spectra_cert/simd.hpp"

namespace spectra_cert {
namespace {

using RowMatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<cplx> start_vector(std::size_t n) {
    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(n);
    for (cplx& x : v) x = {1.0 + 0.25 * u(rng), 0.25 * u(rng)};
    return v;
}

}  // namespace

double hermitian_top_eigenvalue(std::size_t n,
                                const std::function<void(const cplx*, cplx*)>& apply,
                                double rel_tol) {
    if (n == 0) return 0.0;
    const auto& K = simd::active();
    const std::size_t kmax = std::min<std::size_t>(n, 320);
    std::vector<cplx> q = start_vector(n);
    double theta = 0.0;

    for (int restart = 0; restart < 40; ++restart) {
        const double q_norm = std::sqrt(K.norm2_sq(q.data(), n));
        if (q_norm == 0.0) return theta;
        for (cplx& x : q) x /= q_norm;

        std::vector<std::vector<cplx>> V;
        std::vector<double> alpha, beta;
        std::vector<cplx> w(n);
        double last_check = -1.0;
        std::vector<double> ritz;

        for (std::size_t k = 0; k < kmax; ++k) {
            V.push_back(q);
            apply(V.back().data(), w.data());
            const double a = K.dotc(V.back().data(), w.data(), n).real();
            K.axpy(-a, V.back().data(), w.data(), n);
            if (k > 0) K.axpy(-beta.back(), V[k - 1].data(), w.data(), n);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& v : V) K.axpy(-K.dotc(v.data(), w.data(), n), v.data(), w.data(), n);
            const double b = std::sqrt(K.norm2_sq(w.data(), n));
            alpha.push_back(a);

            const bool invariant = b <= 1e-14 * std::max(std::abs(a), std::abs(theta)) || b == 0.0;
            const bool stalled_check = (k % 2 == 1) || invariant || k + 1 == kmax;
            if (stalled_check) {
                const TridiagonalEigen vals = eig_symmetric_tridiagonal(alpha, beta, false);
                theta = vals.values.back();
                const bool flat = last_check >= 0.0 && std::abs(theta - last_check) <= 1e-13 * std::abs(theta);
                last_check = theta;
                if (invariant) return theta;
                if (flat || k + 1 == kmax) {
                    const TridiagonalEigen full = eig_symmetric_tridiagonal(alpha, beta, true);
                    ritz = full.vectors.back();
                    theta = full.values.back();
                    const double resid = b * std::abs(ritz.back());
                    if (resid <= rel_tol * std::abs(theta) || theta == 0.0) return theta;
                    if (k + 1 == kmax) break;
                }
            }
            beta.push_back(b);
            for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
        }
        // restart from the current top Ritz vector
        std::fill(q.begin(), q.end(), cplx{0.0});
        for (std::size_t j = 0; j < ritz.size(); ++j) K.axpy(ritz[j], V[j].data(), q.data(), n);
    }
    throw ConvergenceError("hermitian_top_eigenvalue: Lanczos did not converge after 40 restarts");
}

double largest_singular_value(const DenseComplexMatrix& M) {
    const std::size_t n = M.order();
    if (n == 0) return 0.0;
    std::vector<cplx> tmp(n);
    const double top = hermitian_top_eigenvalue(
        n,
        [&](const cplx* x, cplx* y) {
            M.apply(x, tmp.data());
            M.apply_adjoint(tmp.data(), y);
        },
        1e-11);
    return std::sqrt(std::max(top, 0.0));
}

SmallestSingularValue smallest_singular_value(const DenseComplexMatrix& M) {
    const std::size_t n = M.order();
    if (n == 0) return {0.0, true};
    Eigen::Map<const RowMatC> A(M.data(), n, n);
    const Eigen::MatrixXcd dense = A;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dense);
    const auto& LU = lu.matrixLU();
    double umax = 0.0, umin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        umax = std::max(umax, std::abs(LU(i, i)));
        umin = std::min(umin, std::abs(LU(i, i)));
    }
    if (umax == 0.0 || umin <= std::numeric_limits<double>::epsilon() * 1e-3 * umax)
        return {0.0, true};

    Eigen::VectorXcd buf(n);
    const double top = hermitian_top_eigenvalue(
        n,
        [&](const cplx* x, cplx* y) {
            Eigen::Map<const Eigen::VectorXcd> xv(x, n);
            buf = lu.adjoint().solve(xv);
            Eigen::Map<Eigen::VectorXcd>(y, n) = lu.solve(buf);
        },
        1e-9);
    if (!std::isfinite(top) || top <= 0.0) return {0.0, true};
    const double sigma = 1.0 / std::sqrt(top);
    if (sigma <= std::numeric_limits<double>::epsilon() * M.frobenius_norm()) return {0.0, true};
    return {sigma, false};
}

}  // namespace spectra_cert
