#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "echospec/config.hpp"
#include "echospec/constants.hpp"
#include "echospec/ensemble.hpp"
#include "echospec/errors.hpp"
#include "echospec/potentials.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace echospec;

namespace {

constexpr double kMass = 22500.0;
constexpr double kW1 = 1.0 / 75.0;
constexpr double kKT = 50.0 * kW1; // mean occupation ~50 per axis

AxisPotential harmonic_axis(double omega, double center, double v0) {
    AxisPotential a;
    a.kind = AxisPotential::Kind::harmonic;
    a.label = "y";
    a.mass = kMass;
    a.omega = omega;
    a.center = center;
    a.v0 = v0;
    return a;
}

HarmonicAxisPair desk_pair(double eps, double d, int nb = 80) {
    const double w2 = kW1 * std::sqrt(1.0 + eps);
    return make_axis_pair(harmonic_axis(kW1, 0.0, -1.0), harmonic_axis(w2, d, -1.0), nb);
}

std::vector<double> ladder(double omega, int n, double v0 = 0.0) {
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[i] = omega * (i + 0.5) + v0;
    return e;
}

} // namespace

TEST_CASE("thermal ensembles: counts, clip rule, normalization") {
    SECTION("equal-spacing shell ensemble, reduced scale") {
        ThermalEnsemble ens = thermal_shell_ensemble(kW1, kKT, 1.5);
        REQUIRE(ens.mode == ThermalEnsemble::Mode::shell2d);
        // shells while omega * (s + 1) stays under 1.5 kT = 75 omega
        REQUIRE(ens.smax == 74);
        REQUIRE(ens.n_states() == 2850); // 75 * 76 / 2
        REQUIRE_THAT(ens.weight_sum(), WithinAbs(1.0, 1e-12));
    }
    SECTION("physical-scale shell ensemble") {
        LoadedConfig cfg = config_from_json(nlohmann::ordered_json::object());
        UnitScales u = natural_units(cfg.constants, cfg.trap);
        const double w1 = 2.0 * pi * u.time_s / 3.6e-3;
        const double kT = 1.0 / cfg.trap.depth_ratio;
        ThermalEnsemble ens = thermal_shell_ensemble(w1, kT, cfg.trap.clip_ratio);
        REQUIRE(ens.smax == 2250);
        REQUIRE(ens.n_states() == 2534626); // 2251 * 2252 / 2
        REQUIRE_THAT(ens.weight_sum(), WithinAbs(1.0, 1e-9));
    }
    SECTION("explicit 1d list from eigenvalues") {
        ThermalEnsemble ens = thermal_ensemble_1d(ladder(kW1, 200), kKT, 1.5);
        REQUIRE(ens.mode == ThermalEnsemble::Mode::list1d);
        REQUIRE(ens.n_states() == 75); // E - E0 = omega n < 75 omega
        REQUIRE_THAT(ens.weight_sum(), WithinAbs(1.0, 1e-12));
        // Boltzmann ratio between adjacent levels
        REQUIRE_THAT(ens.weights[1] / ens.weights[0],
                     WithinRel(std::exp(-kW1 / kKT), 1e-12));
    }
    SECTION("explicit 2d grid matches the shell fast path state by state") {
        ThermalEnsemble grid =
            thermal_ensemble_2d(ladder(kW1, 80), ladder(kW1, 80), kKT, 1.5);
        ThermalEnsemble shell = thermal_shell_ensemble(kW1, kKT, 1.5);
        REQUIRE(grid.n_states() == shell.n_states());
        REQUIRE_THAT(grid.weight_sum(), WithinAbs(1.0, 1e-12));
        for (std::size_t i = 0; i < grid.nx.size(); i += 97) {
            const int s = grid.nx[i] + grid.ny[i];
            REQUIRE_THAT(grid.weights[i], WithinRel(shell.shell_state_weight[s], 1e-12));
        }
    }
}

TEST_CASE("dephasing statistics") {
    SECTION("two-state list by hand") {
        ThermalEnsemble ens;
        ens.mode = ThermalEnsemble::Mode::list1d;
        ens.kT = 1.0;
        ens.nx = {0, 1};
        ens.weights = {0.75, 0.25};
        const std::vector<double> nu{2.0, 6.0};
        DephasingEstimate d = dephasing_estimate(ens, nu);
        REQUIRE_THAT(d.mean_shift, WithinRel(3.0, 1e-14));
        // variance = 0.75*1 + 0.25*9 = 3
        REQUIRE_THAT(d.delta_rms, WithinRel(std::sqrt(3.0), 1e-14));
        REQUIRE_THAT(d.decay_time, WithinRel(1.0 / (2.0 * std::sqrt(3.0)), 1e-14));
        REQUIRE(!d.degenerate);
    }
    SECTION("single-state ensemble is flagged degenerate") {
        ThermalEnsemble ens = thermal_ensemble_1d(ladder(kW1, 100), 0.1 * kW1, 1.5);
        REQUIRE(ens.single_state());
        std::vector<double> nu(100);
        for (int i = 0; i < 100; ++i) nu[i] = 0.1 * i + 0.37;
        DephasingEstimate d = dephasing_estimate(ens, nu);
        REQUIRE(d.degenerate);
        REQUIRE_THAT(d.mean_shift, WithinRel(0.37, 1e-12));
        REQUIRE(std::isinf(d.decay_time));
    }
    SECTION("constant spectrum has no spread") {
        ThermalEnsemble ens = thermal_ensemble_1d(ladder(kW1, 100), kKT, 1.5);
        std::vector<double> nu(100, 0.37);
        DephasingEstimate d = dephasing_estimate(ens, nu);
        REQUIRE_THAT(d.mean_shift, WithinRel(0.37, 1e-12));
        REQUIRE(d.delta_rms < 1e-7);
        REQUIRE(d.decay_time > 1e6);
    }
    SECTION("shell ensemble equals the explicit grid") {
        ThermalEnsemble shell = thermal_shell_ensemble(kW1, kKT, 1.5);
        ThermalEnsemble grid =
            thermal_ensemble_2d(ladder(kW1, 80), ladder(kW1, 80), kKT, 1.5);
        std::vector<double> nux(80), nuy(80);
        for (int n = 0; n < 80; ++n) {
            nux[n] = 3e-4 * (n + 0.5) - 1e-3;
            nuy[n] = 3e-4 * (n + 0.5) + 2e-4;
        }
        DephasingEstimate a = dephasing_estimate(shell, nux, nuy);
        DephasingEstimate b = dephasing_estimate(grid, nux, nuy);
        REQUIRE_THAT(a.mean_shift, WithinRel(b.mean_shift, 1e-12));
        REQUIRE_THAT(a.delta_rms, WithinRel(b.delta_rms, 1e-12));
    }
}

TEST_CASE("ensemble averages: exact sums and stratified subsampling") {
    ThermalEnsemble ens = thermal_shell_ensemble(kW1, kKT, 1.5);
    auto fn = [](int nx, int ny) {
        return std::polar(1.0, 0.002 * nx * nx - 0.003 * ny);
    };

    AverageResult full = ensemble_average(ens, fn);
    REQUIRE(!full.subsampled);
    REQUIRE(full.stderr_est == 0.0);
    REQUIRE(full.evaluations == ens.n_states());

    AverageResult sub = ensemble_average(ens, fn, 500, 42);
    REQUIRE(sub.subsampled);
    REQUIRE(sub.evaluations <= 500);
    REQUIRE(sub.stderr_est > 0.0);
    REQUIRE(std::abs(sub.mean - full.mean) < 6.0 * sub.stderr_est);

    AverageResult sub2 = ensemble_average(ens, fn, 500, 42);
    REQUIRE(sub2.mean == sub.mean); // same seed, same draws
    AverageResult sub3 = ensemble_average(ens, fn, 500, 43);
    REQUIRE(sub3.mean != sub.mean);

    // a cap larger than the ensemble falls back to the full sum
    AverageResult big = ensemble_average(ens, fn, 10000, 7);
    REQUIRE(!big.subsampled);
    REQUIRE(big.mean == full.mean);
}

TEST_CASE("shell products against the direct double sum") {
    ThermalEnsemble ens = thermal_shell_ensemble(kW1, 10.0 * kW1, 1.5);
    const int n = ens.smax + 1;
    std::vector<double> ax(n), ay(n);
    for (int i = 0; i < n; ++i) {
        ax[i] = 1.0 / (1.0 + 0.1 * i);
        ay[i] = std::cos(0.05 * i);
    }
    double direct = 0.0;
    for (int s = 0; s <= ens.smax; ++s)
        for (int i = 0; i <= s; ++i)
            direct += ens.shell_state_weight[s] * ax[i] * ay[s - i];
    REQUIRE_THAT(shell_average_product(ens, ax, ay), WithinRel(direct, 1e-12));
}

TEST_CASE("banded overlap against the dense recursion") {
    const double a1 = kMass * kW1;
    const double a2 = a1 * std::sqrt(1.01);

    SECTION("narrow band for a small mismatch") {
        BandedOverlap b = banded_harmonic_overlap(40, a1, a2, 0.005);
        REQUIRE(b.residual <= 1e-12);
        REQUIRE(b.nt == b.nb + 2 * b.half_band);
        Eigen::MatrixXd rec = harmonic_overlap_recursion(b.nt, 40, a1, a2, 0.005);
        double worst = 0.0;
        for (int n = 0; n < 40; ++n)
            for (int j = -b.half_band; j <= b.half_band; ++j) {
                const int k = n + j;
                if (k < 0 || k >= b.nt) continue;
                worst = std::max(worst, std::abs(b.offset(j)[n] - rec(k, n)));
            }
        REQUIRE(worst < 1e-14);
        REQUIRE(b.onn(7) == rec(7, 7));
    }
    SECTION("large displacement widens the band") {
        BandedOverlap narrow = banded_harmonic_overlap(40, a1, a2, 0.005);
        BandedOverlap wide = banded_harmonic_overlap(40, a1, a2, 0.12);
        REQUIRE(wide.half_band > narrow.half_band);
        REQUIRE(wide.residual <= 1e-12);
    }
}

TEST_CASE("banded per-state amplitudes match the dense closed forms") {
    const double eps = 0.01, d = 0.009;
    HarmonicAxisPair ax = desk_pair(eps, d, 40);
    const double w2 = kW1 * std::sqrt(1.0 + eps);

    OverlapMatrix dense;
    dense.entries = harmonic_overlap_recursion(ax.band.nt, 40, kMass * kW1, kMass * w2, d);
    const std::vector<double> e1 = ladder(kW1, 40, -1.0);
    const std::vector<double> e2 = ladder(w2, ax.band.nt, -1.0);

    for (double tau : {3.0, 77.0, 451.0}) {
        std::vector<cplx> ar = banded_ramsey_axis(ax, tau);
        std::vector<cplx> ae = banded_echo_axis(ax, tau);
        for (std::size_t n : {std::size_t{0}, std::size_t{9}, std::size_t{27}}) {
            REQUIRE(std::abs(ar[n] - ramsey_amplitude(dense, e1, e2, n, tau)) < 1e-12);
            REQUIRE(std::abs(ae[n] - echo_amplitude(dense, e1, e2, n, tau)) < 1e-12);
        }
    }
}

TEST_CASE("trace engines agree across layouts") {
    const double eps = 0.01, d = 0.009;
    HarmonicAxisPair ax = desk_pair(eps, d);
    HarmonicAxisPair ay = desk_pair(eps, 0.0);
    const std::vector<double> taus{1.0, 55.0, 117.0, 236.0, 400.0, 471.24};

    SECTION("shell convolution equals the explicit 2d sum") {
        ThermalEnsemble shell = thermal_shell_ensemble(kW1, kKT, 1.5);
        ThermalEnsemble grid =
            thermal_ensemble_2d(ladder(kW1, 80), ladder(kW1, 80), kKT, 1.5);
        auto a = ensemble_echo_trace(shell, ax, &ay, taus, 1);
        auto b = ensemble_echo_trace(grid, ax, &ay, taus, 1);
        auto ra = ensemble_ramsey_trace(shell, ax, &ay, taus, 2.5e-4, 1);
        auto rb = ensemble_ramsey_trace(grid, ax, &ay, taus, 2.5e-4, 1);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            REQUIRE_THAT(a[i].p2, WithinAbs(b[i].p2, 1e-10));
            REQUIRE_THAT(ra[i].p2, WithinAbs(rb[i].p2, 1e-10));
            REQUIRE_THAT(ra[i].contrast, WithinAbs(rb[i].contrast, 1e-10));
        }
    }
    SECTION("banded 1d trace equals the dense-basis engine") {
        ThermalEnsemble ens = thermal_ensemble_1d(ladder(kW1, 80, -1.0), kKT, 1.5);
        const double w2 = kW1 * std::sqrt(1.0 + eps);
        // the banded echo keeps branch-1 levels out to n + 2 * half_band,
        // so the dense basis must extend at least that far
        const int nc = 80 + 2 * ax.band.half_band + 4;
        const int nr = nc + 2 * ax.band.half_band + 4;
        OverlapMatrix dense;
        dense.entries = harmonic_overlap_recursion(nr, nc, kMass * kW1, kMass * w2, d);
        const std::vector<double> e1 = ladder(kW1, nc, -1.0);
        const std::vector<double> e2 = ladder(w2, nr, -1.0);
        auto a = ensemble_ramsey_trace(ens, ax, nullptr, taus, 3e-4, 1);
        auto b = ensemble_ramsey_trace_dense(ens, dense, e1, e2, taus, 3e-4, 1);
        auto ea = ensemble_echo_trace(ens, ax, nullptr, taus, 1);
        auto eb = ensemble_echo_trace_dense(ens, dense, e1, e2, taus, 1);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            REQUIRE_THAT(a[i].p2, WithinAbs(b[i].p2, 1e-10));
            REQUIRE_THAT(ea[i].p2, WithinAbs(eb[i].p2, 1e-10));
        }
    }
    SECTION("thread count does not change the sums") {
        ThermalEnsemble shell = thermal_shell_ensemble(kW1, kKT, 1.5);
        auto a = ensemble_ramsey_trace(shell, ax, &ay, taus, 0.0, 1);
        auto b = ensemble_ramsey_trace(shell, ax, &ay, taus, 0.0, 2);
        for (std::size_t i = 0; i < taus.size(); ++i)
            REQUIRE_THAT(a[i].p2, WithinAbs(b[i].p2, 1e-12));
    }
}

TEST_CASE("thermal contrast decay follows the short-time expansion") {
    // pure frequency mismatch, no sag
    HarmonicAxisPair ax = desk_pair(0.01, 0.0);
    HarmonicAxisPair ay = desk_pair(0.01, 0.0);
    ThermalEnsemble ens = thermal_shell_ensemble(kW1, kKT, 1.5);

    std::vector<double> nu(80);
    const double w2 = kW1 * std::sqrt(1.01);
    for (int n = 0; n < 80; ++n) nu[n] = (w2 - kW1) * (n + 0.5);
    DephasingEstimate est = dephasing_estimate(ens, nu, nu);
    REQUIRE(est.delta_rms > 0.0);
    const double tdec = est.decay_time;

    std::vector<double> taus{0.15 * tdec, 0.3 * tdec, 0.5 * tdec, 1.0 * tdec, 2.0 * tdec};
    auto tr = ensemble_ramsey_trace(ens, ax, &ay, taus, 0.0, 1);

    // cumulant expansion: C ~ exp(-(sigma tau)^2/2) while sigma tau << 1;
    // the residue is the motional sideband weight, a few 1e-3 here
    for (std::size_t i = 0; i < 2; ++i) {
        const double want = std::exp(-0.5 * std::pow(est.delta_rms * taus[i], 2));
        REQUIRE_THAT(tr[i].contrast, WithinAbs(want, 1.2e-2));
    }
    // decay is monotone through the 1/e region; tau = tdec means
    // sigma tau = 1/2, so the contrast is still well above 1/e there
    REQUIRE(tr[4].contrast < tr[3].contrast);
    REQUIRE(tr[3].contrast < tr[2].contrast);
    REQUIRE(tr[2].contrast < tr[1].contrast);
    REQUIRE(tr[1].contrast < tr[0].contrast);
    REQUIRE(tr[3].contrast > 0.6);
    REQUIRE(tr[3].contrast < 0.95);
    REQUIRE(tr[4].contrast > 0.3);
    REQUIRE(tr[4].contrast < 0.85);
}

TEST_CASE("stability curve") {
    ThermalEnsemble ens = thermal_shell_ensemble(kW1, kKT, 1.5);
    const int nb = ens.smax + 1;
    auto builder = [&](double eps) {
        const double w2 = kW1 * std::sqrt(1.0 + eps);
        BandedOverlap bx = banded_harmonic_overlap(nb, kMass * kW1, kMass * w2, 0.01);
        BandedOverlap by = banded_harmonic_overlap(nb, kMass * kW1, kMass * w2, 0.0);
        AxisDiagonals d;
        d.onn_x.assign(bx.offset(0), bx.offset(0) + nb);
        d.onn_y.assign(by.offset(0), by.offset(0) + nb);
        return d;
    };

    SECTION("identity at zero mismatch, monotone decay, factorized average") {
        // the d = 0.01 displacement at eps = 0 is carried by both branches
        // equally, so only the frequency mismatch dephases anything
        auto zero_builder = [&](double eps) {
            AxisDiagonals d = builder(eps);
            if (eps == 0.0) {
                d.onn_x.assign(nb, 1.0);
                d.onn_y.assign(nb, 1.0);
            }
            return d;
        };
        std::vector<double> eps{0.0, 1e-3, 2e-3, 4e-3, 8e-3};
        auto pts = stability_curve(eps, zero_builder, ens);
        REQUIRE(pts.size() == eps.size());
        REQUIRE_THAT(pts[0].avg_onn4, WithinAbs(1.0, 1e-14));
        REQUIRE_THAT(pts[0].p2_longtime, WithinAbs(0.0, 1e-14));
        for (std::size_t i = 1; i < pts.size(); ++i) {
            REQUIRE(pts[i].avg_onn4 < pts[i - 1].avg_onn4);
            REQUIRE_THAT(pts[i].p2_longtime, WithinRel(0.5 * (1.0 - pts[i].avg_onn4), 1e-12));
        }
    }
    SECTION("one point against the direct shell product") {
        auto pts = stability_curve({2e-3}, builder, ens);
        AxisDiagonals d = builder(2e-3);
        std::vector<double> ox(nb), oy(nb);
        for (int i = 0; i < nb; ++i) {
            ox[i] = std::pow(d.onn_x[i], 4);
            oy[i] = std::pow(d.onn_y[i], 4);
        }
        REQUIRE_THAT(pts[0].avg_onn4,
                     WithinRel(shell_average_product(ens, ox, oy), 1e-12));
    }
}
