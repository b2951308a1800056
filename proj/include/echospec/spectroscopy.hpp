#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "echospec/ensemble.hpp"
#include "echospec/spectral.hpp"

namespace echospec {

// Finite-duration rectangular microwave pulse in the rotating-wave frame.
// All quantities internal units. The coupling row for initial state n0 is
// (rabi_omega / 2) * O(k, n0) over a window of branch-2 states selected per
// column: keep levels until the cumulative |O|^2 tail drops below
// window_tail, then pad by window_pad on both sides.
struct RabiProblem {
    double rabi_omega = 0.0;
    double pulse_duration = 0.0;
    const OverlapMatrix* overlap = nullptr;
    const std::vector<double>* e1 = nullptr;
    const std::vector<double>* e2 = nullptr;
    double window_tail = 1e-8;
    int window_pad = 2;
};

// Branch-2 population after the pulse, starting from branch-1 state n0,
// with the drive detuned by delta_mw from the bare hyperfine splitting:
//   H = [ E1_n0            (W/2) O(k,n0) ]
//       [ (W/2) O(k,n0)    E2_k - delta  ]
// evolved exactly through the eigendecomposition of the windowed matrix.
// Errors if the window misses more than 0.1% of the transfer amplitude.
double evolve_rabi(const RabiProblem& problem, std::size_t n0, double delta_mw);

struct SpectrumPoint {
    double detuning = 0.0;  // internal angular frequency
    double p2 = 0.0;
    double stderr_est = 0.0;
};

// Thermal-averaged P2 over a detuning grid. Full enumeration by default;
// max_states switches initial-state selection to the ensemble's seeded
// stratified subsampling.
std::vector<SpectrumPoint> scan_spectrum(const RabiProblem& problem,
                                         const ThermalEnsemble& ens,
                                         const std::vector<double>& detunings,
                                         unsigned threads,
                                         std::optional<std::size_t> max_states = std::nullopt,
                                         std::uint64_t seed = 0);

// Peak bookkeeping for a computed spectrum: carrier = highest point within
// carrier_halfwidth of carrier_mean; one sideband per requested offset,
// searched within 10% of |offset| around carrier + offset.
struct SpectrumAnalysis {
    double carrier_mean = 0.0;
    double carrier_detuning = 0.0;
    double carrier_p2 = 0.0;
    struct Sideband {
        double offset = 0.0;
        double peak_detuning = 0.0;
        double p2 = 0.0;
        double ratio = 0.0;  // sideband / carrier
    };
    std::vector<Sideband> sidebands;
};

SpectrumAnalysis analyze_spectrum(const std::vector<SpectrumPoint>& spectrum,
                                  double carrier_mean, double carrier_halfwidth,
                                  const std::vector<double>& offsets);

}  // namespace echospec
