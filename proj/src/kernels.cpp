#include "lightdic/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace lightdic::kernels {

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_supported() {
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}
#endif

namespace {

const KernelTable& select() {
    const char* override_name = std::getenv("LIGHTDIC_KERNELS");
    if (override_name != nullptr) {
        if (std::strcmp(override_name, "scalar") == 0) return scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
        if (std::strcmp(override_name, "avx2") == 0 && avx2_supported()) return avx2_table();
#endif
#if defined(__aarch64__)
        if (std::strcmp(override_name, "neon") == 0) return neon_table();
#endif
        // unknown or unsupported override: fall through to autodetection
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) return avx2_table();
#endif
#if defined(__aarch64__)
    return neon_table();
#endif
    return scalar_table();
}

} // namespace

const KernelTable& active() {
    static const KernelTable& chosen = select();
    return chosen;
}

} // namespace lightdic::kernels
