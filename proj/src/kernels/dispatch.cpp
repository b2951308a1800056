#include "echospec/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace echospec::kernels {
namespace {

const Backend* resolve() {
    const char* want = std::getenv("ECHOSPEC_SIMD");
#if defined(ECHOSPEC_HAVE_AVX2_TU)
    const bool cpu_ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (want == nullptr || std::strcmp(want, "auto") == 0)
        return cpu_ok ? &avx2_backend : &scalar_backend;
    if (std::strcmp(want, "avx2") == 0 && cpu_ok) return &avx2_backend;
#else
    if (want != nullptr && std::strcmp(want, "avx2") == 0) return &scalar_backend;
#endif
    return &scalar_backend;
}

} // namespace

const Backend& active() {
    static const Backend* b = resolve();
    return *b;
}

const char* active_name() { return active().name; }

} // namespace echospec::kernels
