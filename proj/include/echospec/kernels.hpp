#pragma once
#include <complex>
#include <cstddef>

namespace echospec::kernels {

using cplx = std::complex<double>;

// Reduction and streaming primitives behind the hot loops. Scalar versions are
// the reference; an AVX2+FMA variant is selected at startup when the CPU
// supports it. Override with ECHOSPEC_SIMD=scalar|avx2|auto.
struct Backend {
    // sum_k x[k]
    double (*sum)(const double* x, std::size_t n);
    // sum_k x[k]*y[k]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_k x[k]*y[k], complex, no conjugation
    cplx (*cplx_dot)(const cplx* x, const cplx* y, std::size_t n);
    // sum_k a[k]*b[k]*u[k], a,b real
    cplx (*pair_phase_sum)(const double* a, const double* b, const cplx* u, std::size_t n);
    // sum_k |z[k]|^2 * v[k]
    cplx (*abs2_phase_sum)(const cplx* z, const cplx* v, std::size_t n);
    // dst[k] += a[k]*b[k]*u[k], a,b real
    void (*triad_accum)(cplx* dst, const double* a, const double* b, const cplx* u, std::size_t n);
    // dst[k] += |z[k]|^2 * c
    void (*abs2_accum)(cplx* dst, const cplx* z, cplx c, std::size_t n);
    const char* name;
};

extern const Backend scalar_backend;
#if defined(ECHOSPEC_HAVE_AVX2_TU)
extern const Backend avx2_backend;
#endif

// Active backend (resolved once per process).
const Backend& active();
const char* active_name();

// Convenience forwarders through the active backend.
inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline cplx cplx_dot(const cplx* x, const cplx* y, std::size_t n) { return active().cplx_dot(x, y, n); }
inline cplx pair_phase_sum(const double* a, const double* b, const cplx* u, std::size_t n) {
    return active().pair_phase_sum(a, b, u, n);
}
inline cplx abs2_phase_sum(const cplx* z, const cplx* v, std::size_t n) {
    return active().abs2_phase_sum(z, v, n);
}
inline void triad_accum(cplx* dst, const double* a, const double* b, const cplx* u, std::size_t n) {
    active().triad_accum(dst, a, b, u, n);
}
inline void abs2_accum(cplx* dst, const cplx* z, cplx c, std::size_t n) {
    active().abs2_accum(dst, z, c, n);
}

} // namespace echospec::kernels
