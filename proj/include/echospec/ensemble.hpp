#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "echospec/dynamics.hpp"
#include "echospec/potentials.hpp"
#include "echospec/spectral.hpp"

namespace echospec {

using cplx = std::complex<double>;

// Boltzmann-weighted trap states, clipped while E - E_ground < clip * kT.
// Three layouts: an explicit 1D state list, an explicit 2D (nx, ny) grid,
// and the equal-spacing 2D fast path where everything only depends on the
// shell index s = nx + ny.
struct ThermalEnsemble {
    enum class Mode { list1d, grid2d, shell2d };
    Mode mode = Mode::list1d;
    double kT = 0.0;  // internal energy
    double clip_ratio = 1.5;

    // list1d / grid2d: explicit states with normalized weights.
    std::vector<int> nx;
    std::vector<int> ny;  // empty for list1d
    std::vector<double> weights;

    // shell2d: shells s = 0..smax; each of the s+1 states in shell s
    // carries state_weight[s].
    int smax = -1;
    std::vector<double> shell_state_weight;

    std::size_t n_states() const;
    bool single_state() const { return n_states() == 1; }
    double weight_sum() const;  // 1 up to rounding
};

// 1D list from actual eigenvalues.
ThermalEnsemble thermal_ensemble_1d(const std::vector<double>& e1, double kT,
                                    double clip_ratio);
// Generic separable 2D over explicit (nx, ny) pairs.
ThermalEnsemble thermal_ensemble_2d(const std::vector<double>& e1x,
                                    const std::vector<double>& e1y, double kT,
                                    double clip_ratio);
// Equal-spacing 2D: per-axis level spacing omega1 on both axes, so
// E - E0 = omega1 * s and the clip is a shell cut.
ThermalEnsemble thermal_shell_ensemble(double omega1, double kT, double clip_ratio);

// --- averages -----------------------------------------------------------

struct AverageResult {
    cplx mean{0.0, 0.0};
    double stderr_est = 0.0;  // 0 for full deterministic sums
    bool subsampled = false;
    std::uint64_t seed = 0;
    std::size_t evaluations = 0;
};

// Ensemble average of fn(nx, ny) (ny = 0 for 1D lists). Full ordered
// summation by default; when max_states is given and the ensemble is
// larger, systematic stratified subsampling (m equal-weight strata, one
// draw per stratum at a seed-derived offset) with a standard-error
// estimate. Same seed, same output.
AverageResult ensemble_average(const ThermalEnsemble& ens,
                               const std::function<cplx(int, int)>& fn,
                               std::optional<std::size_t> max_states = std::nullopt,
                               std::uint64_t seed = 0);

// Fast exact averages of separable quantities on shell2d ensembles:
// sum_s w_s sum_{i+j=s} ax[i] * ay[j], evaluated with a reversed-copy dot
// per shell. ax/ay must have length >= smax + 1.
cplx shell_average_product(const ThermalEnsemble& ens, const std::vector<cplx>& ax,
                           const std::vector<cplx>& ay);
double shell_average_product(const ThermalEnsemble& ens, const std::vector<double>& ax,
                             const std::vector<double>& ay);

// --- dephasing estimate ---------------------------------------------------

struct DephasingEstimate {
    double delta_rms = 0.0;   // internal angular frequency
    double decay_time = 0.0;  // 1/(2 delta_rms), internal; inf when degenerate
    double mean_shift = 0.0;  // weighted mean of nu_n
    bool degenerate = false;
};

// nu arrays hold the per-axis diagonal resonance shifts E2_n - E1_n.
// list1d ignores nu_y. Weighted RMS spread about the weighted mean.
DephasingEstimate dephasing_estimate(const ThermalEnsemble& ens,
                                     const std::vector<double>& nu_x,
                                     const std::vector<double>& nu_y = {});

// --- banded overlap and trace engines -------------------------------------

// Diagonal-band storage of a harmonic-pair overlap matrix. Element
// O(n + j, n) lives at offset(j)[n] for j in [-half_band, half_band],
// zero-padded outside [0, nt). nt = nb + 2 * half_band rows keep every
// product appearing in the echo contraction inside the band.
struct BandedOverlap {
    int nb = 0;
    int nt = 0;
    int half_band = 0;
    std::vector<std::vector<double>> diag;
    double residual = 0.0;  // worst column-norm gap over kept columns

    const double* offset(int j) const { return diag[static_cast<std::size_t>(j + half_band)].data(); }
    double onn(int n) const { return offset(0)[n]; }
};

// Builds the band adaptively: half_band grows until every kept column's
// in-band norm is within band_tol of one.
BandedOverlap banded_harmonic_overlap(int nb, double a1, double a2, double d,
                                      double band_tol = 1e-12);

// One trap axis of the two-branch harmonic model.
struct HarmonicAxisPair {
    BandedOverlap band;
    double omega1 = 0.0;
    double omega2 = 0.0;
    double dv0 = 0.0;  // v0(branch 2) - v0(branch 1)
};

// From harmonic surrogate axis potentials (Kind::harmonic).
HarmonicAxisPair make_axis_pair(const AxisPotential& h1, const AxisPotential& h2,
                                int nb, double band_tol = 1e-12);

// Per-state Ramsey amplitudes A[n], n < nb, full phase convention
// (zero-point and potential-bottom offsets included via dv0).
std::vector<cplx> banded_ramsey_axis(const HarmonicAxisPair& axis, double tau);

// Per-state echo amplitudes A[n], n < nb. Constant energy offsets cancel
// in the echo, so only the spacings enter.
std::vector<cplx> banded_echo_axis(const HarmonicAxisPair& axis, double tau);

// --- ensemble traces -------------------------------------------------------

struct TracePoint {
    double tau = 0.0;  // internal time
    double p2 = 0.0;
    double contrast = 0.0;
};

// Thermal Ramsey fringe trace. delta_mw is the drive detuning from the
// bare hyperfine splitting; P2 = (1 + Re(<A> e^{i delta_mw tau}))/2.
// 2D shell ensembles pass both axes; 1D lists pass ay = nullptr.
std::vector<TracePoint> ensemble_ramsey_trace(const ThermalEnsemble& ens,
                                              const HarmonicAxisPair& ax,
                                              const HarmonicAxisPair* ay,
                                              const std::vector<double>& taus,
                                              double delta_mw, unsigned threads);

// Thermal echo trace, P2 = (1 - Re<A>)/2, drive-phase free.
std::vector<TracePoint> ensemble_echo_trace(const ThermalEnsemble& ens,
                                            const HarmonicAxisPair& ax,
                                            const HarmonicAxisPair* ay,
                                            const std::vector<double>& taus,
                                            unsigned threads);

// Dense-basis counterparts for 1D lists over arbitrary bases (Gaussian
// traps). Cost is one banded-free amplitude evaluation per (state, tau).
std::vector<TracePoint> ensemble_ramsey_trace_dense(const ThermalEnsemble& ens,
                                                    const OverlapMatrix& overlap,
                                                    const std::vector<double>& e1,
                                                    const std::vector<double>& e2,
                                                    const std::vector<double>& taus,
                                                    double delta_mw, unsigned threads);
std::vector<TracePoint> ensemble_echo_trace_dense(const ThermalEnsemble& ens,
                                                  const OverlapMatrix& overlap,
                                                  const std::vector<double>& e1,
                                                  const std::vector<double>& e2,
                                                  const std::vector<double>& taus,
                                                  unsigned threads);

// --- stability curve -------------------------------------------------------

struct StabilityPoint {
    double epsilon = 0.0;
    double avg_onn4 = 0.0;
    double p2_longtime = 0.0;  // (1 - avg_onn4) / 2
    double stderr_est = 0.0;
};

// Per-axis |O_nn| diagonals for one epsilon, built by the caller.
struct AxisDiagonals {
    std::vector<double> onn_x;
    std::vector<double> onn_y;  // empty for 1D ensembles
};

// Ensemble average of |O_nn(x)|^4 * |O_nn(y)|^4 for each epsilon in
// ascending order. Fully factorized, deterministic.
std::vector<StabilityPoint> stability_curve(const std::vector<double>& epsilons,
                                            const std::function<AxisDiagonals(double)>& builder,
                                            const ThermalEnsemble& ens);

}  // namespace echospec
