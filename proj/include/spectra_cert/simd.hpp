#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Complex BLAS-1/2 style kernels over interleaved std::complex<double> data.
// A scalar reference table always exists; an AVX2+FMA table is compiled in a
// separate translation unit and picked at runtime when the CPU supports it.
// SPECTRA_CERT_SIMD=scalar forces the reference table.

namespace spectra_cert::simd {

using cplx = std::complex<double>;

struct KernelTable {
    std::string_view name;
    // y[i] = sum_j A[i*cols + j] * x[j]
    void (*gemv)(const cplx* A, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
    // y[j] = sum_i conj(A[i*cols + j]) * x[i]
    void (*gemv_adjoint)(const cplx* A, std::size_t rows, std::size_t cols, const cplx* x,
                         cplx* y);
    // sum_i conj(a[i]) * b[i]
    cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
    // sum_i |x[i]|^2
    double (*norm2_sq)(const cplx* x, std::size_t n);
    // sum_i w[i] * f[i]
    double (*weighted_sum)(const double* w, const double* f, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the AVX2 variant was not compiled or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// Table used by the library; resolved once per process.
const KernelTable& active();

}  // namespace spectra_cert::simd
