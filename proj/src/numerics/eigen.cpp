#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "spectra_cert/numerics.hpp"

namespace spectra_cert {
namespace {

using RowMatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void normalize_phase(std::vector<cplx>& v) {
    double nrm = 0.0;
    std::size_t big = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        nrm += std::norm(v[i]);
        if (std::abs(v[i]) > std::abs(v[big])) big = i;
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return;
    const cplx phase = std::abs(v[big]) > 0.0 ? std::conj(v[big]) / std::abs(v[big]) : cplx{1.0};
    for (cplx& x : v) x = x * phase / nrm;
}

bool pair_less(const EigenPair& a, const EigenPair& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
}

// Index of the bottom-most unreduced subdiagonal of a failed Schur form.
std::size_t stuck_index(const Eigen::MatrixXcd& T) {
    const Eigen::Index n = T.rows();
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const double scale = std::abs(T(i, i)) + std::abs(T(i - 1, i - 1));
        if (std::abs(T(i, i - 1)) > Eigen::NumTraits<double>::epsilon() * scale)
            return static_cast<std::size_t>(i);
    }
    return 0;
}

}  // namespace

std::vector<EigenPair> eig_complex(const DenseComplexMatrix& M) {
    if (!M.all_finite()) throw PreconditionError("eig_complex: matrix has non-finite entries");
    const std::size_t n = M.order();
    std::vector<EigenPair> out;
    if (n == 0) return out;
    out.reserve(n);

    if (M.is_real_symmetric()) {
        Eigen::MatrixXd A(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) A(i, j) = M(i, j).real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("eig_complex: symmetric QR iteration did not converge (order " +
                                   std::to_string(n) + ")");
        for (std::size_t k = 0; k < n; ++k) {
            EigenPair p{es.eigenvalues()(k), std::vector<cplx>(n)};
            for (std::size_t i = 0; i < n; ++i) p.vector[i] = es.eigenvectors()(i, k);
            normalize_phase(p.vector);
            out.push_back(std::move(p));
        }
    } else {
        Eigen::Map<const RowMatC> A(M.data(), n, n);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(A), true);
        if (es.info() != Eigen::Success) {
            Eigen::ComplexSchur<Eigen::MatrixXcd> schur(Eigen::MatrixXcd(A), false);
            throw ConvergenceError("eig_complex: shifted QR did not converge at eigenvalue index " +
                                   std::to_string(stuck_index(schur.matrixT())));
        }
        for (std::size_t k = 0; k < n; ++k) {
            EigenPair p{es.eigenvalues()(k), std::vector<cplx>(n)};
            for (std::size_t i = 0; i < n; ++i) p.vector[i] = es.eigenvectors()(i, k);
            normalize_phase(p.vector);
            out.push_back(std::move(p));
        }
    }
    std::stable_sort(out.begin(), out.end(), pair_less);
    return out;
}

TridiagonalEigen eig_symmetric_tridiagonal(const std::vector<double>& diag,
                                           const std::vector<double>& off, bool want_vectors) {
    const std::size_t n = diag.size();
    if (n == 0 || off.size() + 1 != n)
        throw PreconditionError("eig_symmetric_tridiagonal: need off.size() == diag.size() - 1");
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
    Eigen::VectorXd e(n > 1 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) e(i) = off[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("eig_symmetric_tridiagonal: QR iteration did not converge");
    TridiagonalEigen out;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    if (want_vectors) {
        out.vectors.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            out.vectors[k].resize(n);
            double big = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                out.vectors[k][i] = es.eigenvectors()(i, k);
                if (std::abs(out.vectors[k][i]) > std::abs(big)) big = out.vectors[k][i];
            }
            if (big < 0.0)
                for (double& x : out.vectors[k]) x = -x;
        }
    }
    return out;
}

}  // namespace spectra_cert
