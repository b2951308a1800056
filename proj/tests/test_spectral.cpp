#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "echospec/config.hpp"
#include "echospec/errors.hpp"
#include "echospec/potentials.hpp"
#include "echospec/spectral.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace echospec;

namespace {

// reduced-scale numbers used throughout: m = 22500 so omega = 2/sqrt(m) = 1/75
constexpr double kMass = 22500.0;
constexpr double kOmega = 1.0 / 75.0;

AxisPotential sampled_harmonic(double mass, double omega, double center, double v0,
                               double hw, int n) {
    AxisPotential a;
    a.kind = AxisPotential::Kind::harmonic;
    a.label = "y";
    a.grid = GridSpec{-hw, 2.0 * hw / (n - 1), n};
    a.mass = mass;
    a.omega = omega;
    a.center = center;
    a.v0 = v0;
    a.values.resize(n);
    for (int i = 0; i < n; ++i) {
        const double q = a.grid.x(i) - center;
        a.values[i] = 0.5 * mass * omega * omega * q * q + v0;
    }
    return a;
}

AxisPotential gaussian_axis(double mass, double depth, double hw, int n) {
    AxisPotential a;
    a.kind = AxisPotential::Kind::gaussian;
    a.label = "y";
    a.grid = GridSpec{-hw, 2.0 * hw / (n - 1), n};
    a.mass = mass;
    a.depth = depth;
    a.values.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = a.grid.x(i);
        a.values[i] = -depth * std::exp(-2.0 * x * x);
    }
    return a;
}

PotentialPair desk_gaussian_pair(int npts, std::optional<double> hw_m = std::nullopt) {
    LoadedConfig cfg = config_from_json(nlohmann::ordered_json::object());
    cfg.trap.epsilon_override = 0.01;
    cfg.trap.gravity_enabled = false;
    cfg.trap.tau_osc_pin.reset();
    cfg.numerics.dimensionality = 1;
    cfg.numerics.grid_points_per_axis = npts;
    cfg.numerics.domain_halfwidth = hw_m;
    return build_pair(cfg.trap, cfg.numerics, cfg.constants, kMass);
}

} // namespace

TEST_CASE("discretized harmonic levels match the ladder") {
    AxisPotential ax = sampled_harmonic(kMass, kOmega, 0.0, 0.0, 1.0, 2048);
    SpectralBasis b = diagonalize(ax, 60.5 * kOmega);
    REQUIRE(b.n_states() >= 50);
    for (int n = 0; n < 50; ++n)
        REQUIRE_THAT(b.energies[n], WithinRel(kOmega * (n + 0.5), 1e-10));
    for (int n = 1; n < b.n_states(); ++n)
        REQUIRE(b.energies[n] > b.energies[n - 1]);

    // grid orthonormality of the kept eigenvectors
    const double h = ax.grid.dx;
    double worst = 0.0;
    for (int i = 0; i < 30; ++i)
        for (int j = i; j < 30; ++j) {
            const double s = b.wavefunctions.col(i).dot(b.wavefunctions.col(j)) * h;
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    REQUIRE(worst < 1e-10);
}

TEST_CASE("closed-form basis agrees with the discretized one") {
    AxisPotential ax = sampled_harmonic(kMass, kOmega, 0.05, -1.0, 1.0, 1024);
    SpectralBasis num = diagonalize(ax, -1.0 + 35.5 * kOmega);
    SpectralBasis ana = analytic_harmonic_basis(kOmega, 0.05, 30, kMass, -1.0, ax.grid);
    REQUIRE(ana.analytic);
    REQUIRE_THAT(ana.energies[0], WithinRel(-1.0 + 0.5 * kOmega, 1e-14));

    // mixed overlap goes through grid quadrature; it should be the identity
    OverlapMatrix o = overlap_matrix(num, ana);
    for (int k = 0; k < 30; ++k)
        for (int n = 0; n < 30; ++n) {
            const double want = (k == n) ? 1.0 : 0.0;
            REQUIRE_THAT(o.entries(k, n), WithinAbs(want, 1e-8));
        }
}

TEST_CASE("overlap recursion against quadrature, displaced and scaled") {
    const double w1 = kOmega;
    const double w2 = kOmega * std::sqrt(1.01);
    const double d = 0.01;
    AxisPotential ax1 = sampled_harmonic(kMass, w1, 0.0, 0.0, 1.0, 1024);
    AxisPotential ax2 = sampled_harmonic(kMass, w2, d, 0.0, 1.0, 1024);
    SpectralBasis b1 = diagonalize(ax1, 45.5 * w1);
    SpectralBasis b2 = diagonalize(ax2, 45.5 * w2);
    REQUIRE(b1.n_states() >= 40);
    REQUIRE(b2.n_states() >= 40);

    OverlapMatrix quad = overlap_matrix(b1, b2);
    Eigen::MatrixXd rec =
        harmonic_overlap_recursion(40, 40, kMass * w1, kMass * w2, d);
    double worst = 0.0;
    for (int k = 0; k < 40; ++k)
        for (int n = 0; n < 40; ++n)
            worst = std::max(worst, std::abs(quad.entries(k, n) - rec(k, n)));
    REQUIRE(worst < 1e-8);
}

TEST_CASE("overlap recursion closed forms") {
    const double a = kMass * kOmega;

    SECTION("equal frequencies, displaced") {
        const double d = 0.01;
        Eigen::MatrixXd o = harmonic_overlap_recursion(6, 6, a, a, d);
        REQUIRE_THAT(o(0, 0), WithinRel(std::exp(-a * d * d / 4.0), 1e-12));
    }
    SECTION("scaled frequencies, no displacement") {
        const double a2 = a * std::sqrt(1.01);
        Eigen::MatrixXd o = harmonic_overlap_recursion(8, 8, a, a2, 0.0);
        const double want = std::sqrt(2.0 * std::sqrt(a * a2) / (a + a2));
        REQUIRE_THAT(o(0, 0), WithinRel(want, 1e-12));
        // parity: scaling alone cannot mix even and odd states
        for (int k = 0; k < 8; ++k)
            for (int n = 0; n < 8; ++n)
                if ((k + n) % 2 == 1) REQUIRE(std::abs(o(k, n)) < 1e-15);
    }
    SECTION("columns are complete when enough rows are kept") {
        const double a2 = a * std::sqrt(1.01);
        OverlapMatrix o;
        o.entries = harmonic_overlap_recursion(120, 20, a, a2, 0.01);
        auto [gap_norm2, col] = o.worst_column(20);
        REQUIRE(gap_norm2 > 1.0 - 1e-8);
        REQUIRE(gap_norm2 <= 1.0 + 1e-12);
        REQUIRE(col >= 0);
        REQUIRE(col < 20);
    }
}

TEST_CASE("gaussian bound-state census in the reduced-scale trap") {
    PotentialPair p = desk_gaussian_pair(1024);
    REQUIRE_THAT(p.v1[0].grid.halfwidth(), WithinAbs(2.4, 1e-12));

    SpectralBasis b1 = diagonalize(p.v1[0]);
    SpectralBasis b2 = diagonalize(p.v2[0]);
    REQUIRE(b1.n_states() == 112);
    REQUIRE(b1.dropped_by_tail == 7);
    REQUIRE(b2.n_states() == 113);
    REQUIRE(b2.dropped_by_tail == 7);

    // anharmonic ground state sits just below the bottom-curvature half quantum
    REQUIRE_THAT(b1.energies[0] + 1.0, WithinRel(0.00664999539770073, 1e-9));
    const double spacing = b1.energies[1] - b1.energies[0];
    REQUIRE_THAT(spacing / kOmega, WithinRel(0.994991625365871, 1e-9));
}

TEST_CASE("error paths: shallow traps and undersized domains") {
    // one bound state only
    AxisPotential light = gaussian_axis(0.5, 1.0, 2.4, 512);
    REQUIRE_THROWS_MATCHES(diagonalize(light), NumericsError,
                           MessageMatches(ContainsSubstring("fewer than 2 bound states")));

    // an explicitly requested cutoff that the domain cannot support
    PotentialPair p = desk_gaussian_pair(1024, 50e-6); // halfwidth 1.0 internal
    REQUIRE_THROWS_MATCHES(diagonalize(p.v1[0], -1e-9, 1e-8, true), NumericsError,
                           MessageMatches(ContainsSubstring("domain too small")));
}

TEST_CASE("grid doubling leaves the ground energy in place") {
    PotentialPair pa = desk_gaussian_pair(512);
    PotentialPair pb = desk_gaussian_pair(1024);
    SpectralBasis a = diagonalize(pa.v1[0]);
    SpectralBasis b = diagonalize(pb.v1[0]);
    REQUIRE(std::abs(a.energies[0] - b.energies[0]) < 1e-12);
}

TEST_CASE("spectrum cache round trip") {
    namespace fs = std::filesystem;
    PotentialPair p = desk_gaussian_pair(512);
    SpectralBasis b = diagonalize(p.v1[0]);

    const fs::path dir =
        fs::temp_directory_path() / ("echospec_cache_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    const std::string key = spectral_cache_key(p.v1[0], std::nullopt);
    REQUIRE(!key.empty());
    // the key depends on the cutoff
    REQUIRE(spectral_cache_key(p.v1[0], -0.5) != key);

    store_cached_basis(dir.string(), key, b);
    auto back = load_cached_basis(dir.string(), key);
    REQUIRE(back.has_value());
    REQUIRE(back->n_states() == b.n_states());
    REQUIRE(back->dropped_by_tail == b.dropped_by_tail);
    REQUIRE(back->grid.same_as(b.grid));
    REQUIRE((back->energies - b.energies).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back->wavefunctions - b.wavefunctions).cwiseAbs().maxCoeff() == 0.0);

    REQUIRE(!load_cached_basis(dir.string(), key + "0").has_value());
    fs::remove_all(dir);
}

TEST_CASE("analytic basis input checks") {
    REQUIRE_THROWS_AS(analytic_harmonic_basis(0.0, 0.0, 4, kMass), NumericsError);
    REQUIRE_THROWS_AS(analytic_harmonic_basis(kOmega, 0.0, 4, -1.0), NumericsError);
}
