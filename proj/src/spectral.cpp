#include "echospec/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <lapacke.h>

#include "echospec/errors.hpp"

namespace echospec {

namespace {

// FNV-1a over raw bytes
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> psi) {
    // make the rightmost significant sample positive (harmonic tails are
    // positive on the right, so this matches the closed-form convention)
    const double thresh = 1e-3 * psi.cwiseAbs().maxCoeff();
    for (int i = static_cast<int>(psi.size()) - 1; i >= 0; --i) {
        if (std::abs(psi[i]) > thresh) {
            if (psi[i] < 0.0) psi = -psi;
            return;
        }
    }
}

double outer_tail_fraction(const Eigen::VectorXd& psi, double dx) {
    const int n = static_cast<int>(psi.size());
    const int edge = std::max(1, n / 10);
    double t = 0.0;
    for (int i = 0; i < edge; ++i) t += psi[i] * psi[i] + psi[n - 1 - i] * psi[n - 1 - i];
    return t * dx;
}

} // namespace

std::pair<double, int> OverlapMatrix::worst_column(int n_check) const {
    double worst = 2.0;
    int arg = -1;
    n_check = std::min<int>(n_check, static_cast<int>(entries.cols()));
    for (int n = 0; n < n_check; ++n) {
        const double c = column_norm2(n);
        if (c < worst) {
            worst = c;
            arg = n;
        }
    }
    return {worst, arg};
}

SpectralBasis diagonalize(const AxisPotential& axis, std::optional<double> cutoff_internal,
                          double tail_tol, bool cutoff_was_requested) {
    axis.check_invariants();
    const int n = axis.grid.n;
    const double h = axis.grid.dx;
    const double m = axis.mass;
    if (n < 64) throw ConfigError("numerics.grid_points_per_axis must be >= 64");
    if (!(m > 0.0)) throw NumericsError("axis potential has no mass set");

    const double cutoff = cutoff_internal
                              ? *cutoff_internal
                              : std::min(axis.values[0], axis.values[n - 1]);

    // kinetic matrix: T_ij = (-1)^(i-j)/(2 m h^2) * [pi^2/3 diagonal, 2/(i-j)^2 off]
    const double kin = 1.0 / (2.0 * m * h * h);
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            double t;
            if (i == j)
                t = kin * pi * pi / 3.0 + axis.values[i];
            else {
                const int d = j - i;
                t = kin * 2.0 / (static_cast<double>(d) * d);
                if (d % 2 != 0) t = -t;
            }
            a[static_cast<std::size_t>(j) * n + i] = t;
        }
    }

    const double vmin = axis.values.minCoeff();
    lapack_int found = 0;
    std::vector<double> w(n);
    std::vector<double> z(static_cast<std::size_t>(n) * n);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'V', 'U', n, a.data(), n, vmin - 1.0, cutoff, 0, 0, 0.0, &found,
        w.data(), z.data(), n, isuppz.data());
    if (info != 0) throw NumericsError("eigensolver failed (dsyevr info != 0)");
    if (found < 2)
        throw NumericsError("fewer than 2 bound states below the cutoff; trap too shallow "
                            "for the requested physics");

    SpectralBasis b;
    b.grid = axis.grid;
    b.mass = m;
    const double inv_sqrt_h = 1.0 / std::sqrt(h);
    std::vector<int> keep;
    keep.reserve(found);
    for (int k = 0; k < found; ++k) {
        Eigen::Map<Eigen::VectorXd> psi(z.data() + static_cast<std::size_t>(k) * n, n);
        const double tail = outer_tail_fraction(psi, 1.0); // unit 2-norm here
        if (tail <= tail_tol)
            keep.push_back(k);
        else
            ++b.dropped_by_tail;
    }
    if (b.dropped_by_tail > 0 && cutoff_was_requested) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "domain too small for the requested cutoff: %d state(s) leak into the "
                      "outer 10%%; suggest domain halfwidth >= %.3g (internal units)",
                      b.dropped_by_tail, axis.grid.halfwidth() * 1.5);
        throw NumericsError(msg);
    }
    if (static_cast<int>(keep.size()) < 2)
        throw NumericsError("fewer than 2 bound states survive the edge-tail check");

    b.energies.resize(keep.size());
    b.wavefunctions.resize(n, keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        b.energies[j] = w[keep[j]];
        Eigen::Map<Eigen::VectorXd> psi(z.data() + static_cast<std::size_t>(keep[j]) * n, n);
        b.wavefunctions.col(j) = psi * inv_sqrt_h;
        fix_sign(b.wavefunctions.col(j));
    }
    return b;
}

SpectralBasis analytic_harmonic_basis(double omega, double center, int n_states, double mass,
                                      double v0, std::optional<GridSpec> grid) {
    if (!(omega > 0.0)) throw NumericsError("harmonic basis needs omega > 0");
    if (!(mass > 0.0)) throw NumericsError("harmonic basis needs mass > 0");
    SpectralBasis b;
    b.analytic = true;
    b.omega = omega;
    b.center = center;
    b.mass = mass;
    b.e0 = v0;
    b.energies.resize(n_states);
    for (int k = 0; k < n_states; ++k) b.energies[k] = v0 + omega * (k + 0.5);
    if (grid) {
        b.grid = *grid;
        const int ng = grid->n;
        b.wavefunctions.resize(ng, n_states);
        const double aa = mass * omega;
        const double norm0 = std::pow(aa / pi, 0.25);
        Eigen::VectorXd xi(ng);
        for (int i = 0; i < ng; ++i) xi[i] = std::sqrt(aa) * (grid->x(i) - center);
        b.wavefunctions.col(0) = (norm0 * (-0.5 * xi.array().square()).exp()).matrix();
        if (n_states > 1)
            b.wavefunctions.col(1) =
                (std::sqrt(2.0) * xi.array() * b.wavefunctions.col(0).array()).matrix();
        for (int k = 1; k + 1 < n_states; ++k)
            b.wavefunctions.col(k + 1) =
                ((std::sqrt(2.0) * xi.array() * b.wavefunctions.col(k).array() -
                  std::sqrt(static_cast<double>(k)) * b.wavefunctions.col(k - 1).array()) /
                 std::sqrt(static_cast<double>(k) + 1.0))
                    .matrix();
    }
    return b;
}

Eigen::MatrixXd harmonic_overlap_recursion(int n_rows2, int n_cols1, double a1, double a2,
                                           double d) {
    const int K = n_rows2, N = n_cols1;
    const double A = a1 + a2;
    const double sig = (a2 - a1) / A;
    const double gam = 2.0 * std::sqrt(a1 * a2) / A;
    const double b1 = 2.0 * a2 * std::sqrt(a1) * d / A;
    const double b2 = -2.0 * a1 * std::sqrt(a2) * d / A;

    // O(k, n) = <k (a2, displaced by d)| n (a1)>
    Eigen::MatrixXd O(K, N);
    O(0, 0) = std::sqrt(2.0 * std::sqrt(a1 * a2) / A) * std::exp(-a1 * a2 * d * d / (2.0 * A));
    // first column: k-recursion
    for (int k = 0; k + 1 < K; ++k) {
        double s = b2 / std::sqrt(2.0 * (k + 1)) * O(k, 0);
        if (k >= 1) s += sig * std::sqrt(static_cast<double>(k) / (k + 1)) * O(k - 1, 0);
        O(k + 1, 0) = s;
    }
    // march columns n -> n+1
    for (int n = 0; n + 1 < N; ++n) {
        const double c1 = b1 / std::sqrt(2.0 * (n + 1));
        const double c2 = n >= 1 ? sig * std::sqrt(static_cast<double>(n) / (n + 1)) : 0.0;
        const double c3 = gam / std::sqrt(static_cast<double>(n) + 1.0);
        for (int k = 0; k < K; ++k) {
            double s = c1 * O(k, n);
            if (n >= 1) s -= c2 * O(k, n - 1);
            if (k >= 1) s += c3 * std::sqrt(static_cast<double>(k)) * O(k - 1, n);
            O(k, n + 1) = s;
        }
    }
    return O;
}

OverlapMatrix overlap_matrix(const SpectralBasis& b1, const SpectralBasis& b2) {
    OverlapMatrix o;
    if (b1.analytic && b2.analytic) {
        if (b1.mass != b2.mass)
            throw NumericsError("overlap between bases of different mass is not defined here");
        o.entries = harmonic_overlap_recursion(b2.n_states(), b1.n_states(), b1.mass * b1.omega,
                                               b2.mass * b2.omega, b2.center - b1.center);
        return o;
    }
    if (b1.wavefunctions.size() == 0 || b2.wavefunctions.size() == 0)
        throw NumericsError("grid overlap requires wavefunctions on both bases");
    if (!b1.grid.same_as(b2.grid)) throw NumericsError("basis-grid mismatch in overlap_matrix");
    o.entries = b2.grid.dx * (b2.wavefunctions.transpose() * b1.wavefunctions);
    return o;
}

std::string spectral_cache_key(const AxisPotential& axis, std::optional<double> cutoff_internal) {
    std::uint64_t h = fnv1a("espec-basis-v1", 14);
    h = fnv1a(axis.values.data(), sizeof(double) * axis.values.size(), h);
    const double meta[6] = {axis.mass,
                            cutoff_internal ? *cutoff_internal : std::nan(""),
                            axis.grid.x0,
                            axis.grid.dx,
                            static_cast<double>(axis.grid.n),
                            0.0};
    h = fnv1a(meta, sizeof(meta), h);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {
constexpr char cache_magic[8] = {'E', 'S', 'P', 'C', '0', '0', '0', '1'};
}

std::optional<SpectralBasis> load_cached_basis(const std::string& dir, const std::string& key) {
    const std::filesystem::path p = std::filesystem::path(dir) / (key + ".spec");
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    std::int64_t hdr[3];
    double gs[3];
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    in.read(reinterpret_cast<char*>(gs), sizeof(gs));
    if (!in || std::memcmp(magic, cache_magic, 8) != 0) return std::nullopt;
    SpectralBasis b;
    const std::int64_t nst = hdr[0], ng = hdr[1];
    b.dropped_by_tail = static_cast<int>(hdr[2]);
    b.grid = {gs[0], gs[1], static_cast<int>(ng)};
    b.energies.resize(nst);
    b.wavefunctions.resize(ng, nst);
    in.read(reinterpret_cast<char*>(b.energies.data()), sizeof(double) * nst);
    in.read(reinterpret_cast<char*>(b.wavefunctions.data()), sizeof(double) * nst * ng);
    double mass = 0.0;
    in.read(reinterpret_cast<char*>(&mass), sizeof(double));
    if (!in) return std::nullopt;
    b.mass = mass;
    return b;
}

void store_cached_basis(const std::string& dir, const std::string& key, const SpectralBasis& b) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::filesystem::path p = std::filesystem::path(dir) / (key + ".spec");
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) return; // cache is best-effort
    const std::int64_t hdr[3] = {b.n_states(), b.grid.n, b.dropped_by_tail};
    const double gs[3] = {b.grid.x0, b.grid.dx, 0.0};
    out.write(cache_magic, 8);
    out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
    out.write(reinterpret_cast<const char*>(gs), sizeof(gs));
    out.write(reinterpret_cast<const char*>(b.energies.data()), sizeof(double) * b.n_states());
    out.write(reinterpret_cast<const char*>(b.wavefunctions.data()),
              sizeof(double) * b.n_states() * b.grid.n);
    out.write(reinterpret_cast<const char*>(&b.mass), sizeof(double));
}

} // namespace echospec
