#include "spectra_cert/simd.hpp"

namespace spectra_cert::simd {
namespace {

void gemv_scalar(const cplx* A, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        const cplx* row = A + i * cols;
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double ar = row[j].real(), ai = row[j].imag();
            const double xr = x[j].real(), xi = x[j].imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        y[i] = {re, im};
    }
}

void axpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
    }
}

// y_j += conj(row_j) * s
void conj_axpy_scalar(cplx s, const cplx* row, cplx* y, std::size_t n) {
    const double sr = s.real(), si = s.imag();
    for (std::size_t j = 0; j < n; ++j) {
        const double ar = row[j].real(), ai = row[j].imag();
        y[j] = {y[j].real() + ar * sr + ai * si, y[j].imag() + ar * si - ai * sr};
    }
}

void gemv_adjoint_scalar(const cplx* A, std::size_t rows, std::size_t cols, const cplx* x,
                         cplx* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) conj_axpy_scalar(x[i], A + i * cols, y, cols);
}

cplx dotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

double norm2_sq_scalar(const cplx* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

double weighted_sum_scalar(const double* w, const double* f, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * f[i];
    return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar",         gemv_scalar,    gemv_adjoint_scalar,
                                   dotc_scalar,      axpy_scalar,    norm2_sq_scalar,
                                   weighted_sum_scalar};
    return table;
}

}  // namespace spectra_cert::simd
