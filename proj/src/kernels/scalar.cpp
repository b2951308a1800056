#include "echospec/kernels.hpp"

namespace echospec::kernels {
namespace {

double sum_s(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += x[k];
    return acc;
}

double dot_s(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += x[k] * y[k];
    return acc;
}

cplx cplx_dot_s(const cplx* x, const cplx* y, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double xr = x[k].real(), xi = x[k].imag();
        const double yr = y[k].real(), yi = y[k].imag();
        re += xr * yr - xi * yi;
        im += xr * yi + xi * yr;
    }
    return {re, im};
}

cplx pair_phase_sum_s(const double* a, const double* b, const cplx* u, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = a[k] * b[k];
        re += w * u[k].real();
        im += w * u[k].imag();
    }
    return {re, im};
}

cplx abs2_phase_sum_s(const cplx* z, const cplx* v, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double m = z[k].real() * z[k].real() + z[k].imag() * z[k].imag();
        re += m * v[k].real();
        im += m * v[k].imag();
    }
    return {re, im};
}

void triad_accum_s(cplx* dst, const double* a, const double* b, const cplx* u, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double w = a[k] * b[k];
        dst[k] += cplx{w * u[k].real(), w * u[k].imag()};
    }
}

void abs2_accum_s(cplx* dst, const cplx* z, cplx c, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double m = z[k].real() * z[k].real() + z[k].imag() * z[k].imag();
        dst[k] += cplx{m * c.real(), m * c.imag()};
    }
}

} // namespace

const Backend scalar_backend = {
    sum_s, dot_s, cplx_dot_s, pair_phase_sum_s, abs2_phase_sum_s,
    triad_accum_s, abs2_accum_s, "scalar",
};

} // namespace echospec::kernels
