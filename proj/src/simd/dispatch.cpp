#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace spectra_cert::simd {

const KernelTable* avx2_kernels() {
#if defined(SPECTRA_CERT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("SPECTRA_CERT_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
        const KernelTable* fast = avx2_kernels();
        return fast != nullptr ? fast : &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace spectra_cert::simd
