#include <cmath>

#include "spectra_cert/numerics.hpp"
#include "spectra_cert/simd.hpp"

namespace spectra_cert {

DenseComplexMatrix::DenseComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

DenseComplexMatrix::DenseComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : n_(rows.size()), data_(rows.size() * rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != n_) throw PreconditionError("DenseComplexMatrix: matrix must be square");
        std::size_t j = 0;
        for (const cplx& v : row) (*this)(i, j++) = v;
        ++i;
    }
}

DenseComplexMatrix DenseComplexMatrix::identity(std::size_t n) {
    DenseComplexMatrix I(n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

void DenseComplexMatrix::apply(const cplx* x, cplx* y) const {
    simd::active().gemv(data_.data(), n_, n_, x, y);
}

void DenseComplexMatrix::apply_adjoint(const cplx* x, cplx* y) const {
    simd::active().gemv_adjoint(data_.data(), n_, n_, x, y);
}

std::vector<cplx> DenseComplexMatrix::apply(const std::vector<cplx>& x) const {
    if (x.size() != n_) throw PreconditionError("DenseComplexMatrix::apply: size mismatch");
    std::vector<cplx> y(n_);
    apply(x.data(), y.data());
    return y;
}

DenseComplexMatrix DenseComplexMatrix::adjoint() const {
    DenseComplexMatrix A(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) A(j, i) = std::conj((*this)(i, j));
    return A;
}

double DenseComplexMatrix::frobenius_norm() const {
    return std::sqrt(simd::active().norm2_sq(data_.data(), data_.size()));
}

bool DenseComplexMatrix::all_finite() const {
    for (const cplx& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

bool DenseComplexMatrix::is_real_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*this)(i, i).imag() != 0.0) return false;
        for (std::size_t j = i + 1; j < n_; ++j) {
            const cplx a = (*this)(i, j), b = (*this)(j, i);
            if (a.imag() != 0.0 || b.imag() != 0.0 || a.real() != b.real()) return false;
        }
    }
    return true;
}

}  // namespace spectra_cert
