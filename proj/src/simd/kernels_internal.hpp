#pragma once

#include "spectra_cert/simd.hpp"

namespace spectra_cert::simd {

#if defined(SPECTRA_CERT_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace spectra_cert::simd
