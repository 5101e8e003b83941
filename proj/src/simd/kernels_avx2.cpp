// AVX2 + FMA kernels. Compiled with -mavx2 -mfma; only reached through the
// runtime dispatcher after a CPU feature check.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace spectra_cert::simd {
namespace {

// [ar0 ai0 ar1 ai1] * [br0 bi0 br1 bi1] as two complex products.
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

// conj(a) * b
inline __m256d cmul_conj(__m256d a, __m256d b) {
    const __m256d a_re = _mm256_movedup_pd(a);
    const __m256d a_im = _mm256_permute_pd(a, 0xF);
    const __m256d b_sw = _mm256_permute_pd(b, 0x5);
    return _mm256_fmsubadd_pd(b, a_re, _mm256_mul_pd(b_sw, a_im));
}

inline cplx hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return {_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
}

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

cplx dot_plain(const cplx* a, const cplx* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, cmul(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i))));
        acc1 = _mm256_add_pd(acc1,
                             cmul(_mm256_loadu_pd(dp(a + i + 2)), _mm256_loadu_pd(dp(b + i + 2))));
    }
    cplx s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_avx2(const cplx* A, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot_plain(A + i * cols, x, cols);
}

cplx dotc_avx2(const cplx* a, const cplx* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0,
                             cmul_conj(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i))));
        acc1 = _mm256_add_pd(
            acc1, cmul_conj(_mm256_loadu_pd(dp(a + i + 2)), _mm256_loadu_pd(dp(b + i + 2))));
    }
    cplx s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void axpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const __m256d al = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d yv = _mm256_loadu_pd(dp(y + i));
        _mm256_storeu_pd(dp(y + i), _mm256_add_pd(yv, cmul(al, _mm256_loadu_pd(dp(x + i)))));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_adjoint_avx2(const cplx* A, std::size_t rows, std::size_t cols, const cplx* x,
                       cplx* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        const cplx* row = A + i * cols;
        const __m256d s = _mm256_setr_pd(x[i].real(), x[i].imag(), x[i].real(), x[i].imag());
        std::size_t j = 0;
        for (; j + 2 <= cols; j += 2) {
            const __m256d yv = _mm256_loadu_pd(dp(y + j));
            _mm256_storeu_pd(dp(y + j),
                             _mm256_add_pd(yv, cmul_conj(_mm256_loadu_pd(dp(row + j)), s)));
        }
        for (; j < cols; ++j) y[j] += std::conj(row[j]) * x[i];
    }
}

double norm2_sq_avx2(const cplx* x, std::size_t n) {
    const double* d = dp(x);
    const std::size_t m = 2 * n;
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= m; i += 8) {
        const __m256d a = _mm256_loadu_pd(d + i);
        const __m256d b = _mm256_loadu_pd(d + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    const cplx h = hsum(_mm256_add_pd(acc0, acc1));
    double s = h.real() + h.imag();
    for (; i < m; ++i) s += d[i] * d[i];
    return s;
}

double weighted_sum_avx2(const double* w, const double* f, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(f + i + 4), acc1);
    }
    const cplx h = hsum(_mm256_add_pd(acc0, acc1));
    double s = h.real() + h.imag();
    for (; i < n; ++i) s += w[i] * f[i];
    return s;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2",         gemv_avx2, gemv_adjoint_avx2, dotc_avx2,
                                   axpy_avx2,      norm2_sq_avx2, weighted_sum_avx2};
    return table;
}

}  // namespace spectra_cert::simd
