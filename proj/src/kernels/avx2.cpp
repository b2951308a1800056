#include "echospec/kernels.hpp"

#include <immintrin.h>

// AVX2+FMA variants. Complex arrays are interleaved (re,im) pairs, so one
// 256-bit register holds two complex numbers. Reduction order differs from
// the scalar kernels (4- or 2-way partial sums), which is why equivalence
// tests carry a length-scaled tolerance.

namespace echospec::kernels {
namespace {

inline double hsum4(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// [re_sum, im_sum] from a register holding alternating (re,im) partial sums
inline cplx hsum_cplx(__m256d acc) {
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return {_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
}

double sum_v(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + k));
    double r = hsum4(acc);
    for (; k < n; ++k) r += x[k];
    return r;
}

double dot_v(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k), acc);
    double r = hsum4(acc);
    for (; k < n; ++k) r += x[k] * y[k];
    return r;
}

// complex product of register pairs: (xr+i xi)(yr+i yi)
inline __m256d cmul(__m256d xv, __m256d yv) {
    __m256d xr = _mm256_movedup_pd(xv);           // [xr0,xr0,xr1,xr1]
    __m256d xi = _mm256_permute_pd(xv, 0xF);      // [xi0,xi0,xi1,xi1]
    __m256d ys = _mm256_permute_pd(yv, 0x5);      // [yi0,yr0,yi1,yr1]
    return _mm256_fmaddsub_pd(xr, yv, _mm256_mul_pd(xi, ys));
}

cplx cplx_dot_v(const cplx* x, const cplx* y, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(xd + 2 * k), _mm256_loadu_pd(yd + 2 * k)));
    cplx r = hsum_cplx(acc);
    for (; k < n; ++k) r += x[k] * y[k];
    return r;
}

cplx pair_phase_sum_v(const double* a, const double* b, const cplx* u, std::size_t n) {
    const double* ud = reinterpret_cast<const double*>(u);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d w = _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        __m256d wlo = _mm256_permute4x64_pd(w, 0x50); // [w0,w0,w1,w1]
        __m256d whi = _mm256_permute4x64_pd(w, 0xFA); // [w2,w2,w3,w3]
        acc0 = _mm256_fmadd_pd(wlo, _mm256_loadu_pd(ud + 2 * k), acc0);
        acc1 = _mm256_fmadd_pd(whi, _mm256_loadu_pd(ud + 2 * k + 4), acc1);
    }
    cplx r = hsum_cplx(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) {
        const double w = a[k] * b[k];
        r += cplx{w * u[k].real(), w * u[k].imag()};
    }
    return r;
}

// |z|^2 duplicated into both lanes of each complex slot
inline __m256d abs2dup(__m256d zv) {
    __m256d sq = _mm256_mul_pd(zv, zv);
    return _mm256_hadd_pd(sq, sq); // [|z0|^2,|z0|^2,|z1|^2,|z1|^2]
}

cplx abs2_phase_sum_v(const cplx* z, const cplx* v, std::size_t n) {
    const double* zd = reinterpret_cast<const double*>(z);
    const double* vd = reinterpret_cast<const double*>(v);
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        acc = _mm256_fmadd_pd(abs2dup(_mm256_loadu_pd(zd + 2 * k)), _mm256_loadu_pd(vd + 2 * k), acc);
    cplx r = hsum_cplx(acc);
    for (; k < n; ++k) {
        const double m = std::norm(z[k]);
        r += cplx{m * v[k].real(), m * v[k].imag()};
    }
    return r;
}

void triad_accum_v(cplx* dst, const double* a, const double* b, const cplx* u, std::size_t n) {
    double* dd = reinterpret_cast<double*>(dst);
    const double* ud = reinterpret_cast<const double*>(u);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d w = _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        __m256d wlo = _mm256_permute4x64_pd(w, 0x50);
        __m256d whi = _mm256_permute4x64_pd(w, 0xFA);
        __m256d d0 = _mm256_loadu_pd(dd + 2 * k);
        __m256d d1 = _mm256_loadu_pd(dd + 2 * k + 4);
        _mm256_storeu_pd(dd + 2 * k, _mm256_fmadd_pd(wlo, _mm256_loadu_pd(ud + 2 * k), d0));
        _mm256_storeu_pd(dd + 2 * k + 4, _mm256_fmadd_pd(whi, _mm256_loadu_pd(ud + 2 * k + 4), d1));
    }
    for (; k < n; ++k) {
        const double w = a[k] * b[k];
        dst[k] += cplx{w * u[k].real(), w * u[k].imag()};
    }
}

void abs2_accum_v(cplx* dst, const cplx* z, cplx c, std::size_t n) {
    double* dd = reinterpret_cast<double*>(dst);
    const double* zd = reinterpret_cast<const double*>(z);
    const __m256d cv = _mm256_setr_pd(c.real(), c.imag(), c.real(), c.imag());
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        __m256d d = _mm256_loadu_pd(dd + 2 * k);
        _mm256_storeu_pd(dd + 2 * k, _mm256_fmadd_pd(abs2dup(_mm256_loadu_pd(zd + 2 * k)), cv, d));
    }
    for (; k < n; ++k) {
        const double m = std::norm(z[k]);
        dst[k] += cplx{m * c.real(), m * c.imag()};
    }
}

} // namespace

const Backend avx2_backend = {
    sum_v, dot_v, cplx_dot_v, pair_phase_sum_v, abs2_phase_sum_v,
    triad_accum_v, abs2_accum_v, "avx2",
};

} // namespace echospec::kernels
