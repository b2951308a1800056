#pragma once
#include <optional>
#include <string>

#include <Eigen/Core>

#include "echospec/config.hpp"
#include "echospec/potentials.hpp"

namespace echospec {

// Bound eigenstates of one axis potential.
struct SpectralBasis {
    Eigen::VectorXd energies;      // internal, strictly ascending
    Eigen::MatrixXd wavefunctions; // ngrid x n_states, grid-normalized; may be empty
    GridSpec grid;                 // meaningful when wavefunctions present
    bool analytic = false;         // closed-form harmonic basis
    double omega = 0.0, center = 0.0, mass = 0.0, e0 = 0.0; // analytic parameters

    int n_states() const { return static_cast<int>(energies.size()); }
    int dropped_by_tail = 0;       // states under the cutoff rejected by the edge-tail check
};

struct OverlapMatrix {
    // entries(k, n) = <k (branch 2)| n (branch 1)>
    Eigen::MatrixXd entries;
    double column_norm2(int n) const { return entries.col(n).squaredNorm(); }
    // (value, column index) of the worst completeness among columns [0, n_check)
    std::pair<double, int> worst_column(int n_check) const;
};

// Sharp-cutoff sinc pseudospectral discretization of
// -(1/2m) d^2/dq^2 + V(q); partial spectrum below the cutoff.
// cutoff: internal energy; default = potential value at the domain edge.
// States whose norm fraction in the outer 10% of the domain exceeds
// tail_tol are dropped (counted in dropped_by_tail); if an explicitly
// requested cutoff loses states this way, throws NumericsError suggesting a
// larger halfwidth. Fewer than 2 bound states is an error.
SpectralBasis diagonalize(const AxisPotential& axis,
                          std::optional<double> cutoff_internal = std::nullopt,
                          double tail_tol = 1e-8, bool cutoff_was_requested = false);

// Harmonic eigenbasis, closed form. Wavefunctions evaluated when a grid is
// given; otherwise the basis is analytic-only (overlaps via recursion).
SpectralBasis analytic_harmonic_basis(double omega, double center, int n_states, double mass,
                                      double v0 = 0.0,
                                      std::optional<GridSpec> grid = std::nullopt);

// Franck-Condon matrix between two bases. Analytic x analytic uses the
// stable scaled+displaced recursion; anything else uses grid quadrature
// (grids must match).
OverlapMatrix overlap_matrix(const SpectralBasis& b1, const SpectralBasis& b2);

// O(k,n) = <k|n> between harmonic bases with a_i = m*omega_i and center
// displacement d = c2 - c1. Stable two-term recursion, no factorials.
Eigen::MatrixXd harmonic_overlap_recursion(int n_rows2, int n_cols1, double a1, double a2,
                                           double d);

// Separable 2D composition; never materializes the product matrix.
struct TensorOverlap {
    const OverlapMatrix* ox = nullptr;
    const OverlapMatrix* oy = nullptr;
    double operator()(int kx, int ky, int nx, int ny) const {
        return ox->entries(kx, nx) * oy->entries(ky, ny);
    }
    double column_norm2(int nx, int ny) const {
        return ox->column_norm2(nx) * oy->column_norm2(ny);
    }
};

// Binary spectrum cache. Key covers the potential samples, mass, cutoff and
// grid. Returns empty optional on miss or mismatch.
std::string spectral_cache_key(const AxisPotential& axis, std::optional<double> cutoff_internal);
std::optional<SpectralBasis> load_cached_basis(const std::string& dir, const std::string& key);
void store_cached_basis(const std::string& dir, const std::string& key, const SpectralBasis& b);

} // namespace echospec
