#include "echospec/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "echospec/errors.hpp"
#include "echospec/parallel.hpp"

namespace echospec {

namespace {

struct Window {
    int lo = 0;  // branch-2 index range [lo, hi)
    int hi = 0;
};

Window select_window(const OverlapMatrix& overlap, std::size_t n0, double tail, int pad) {
    const Eigen::MatrixXd& O = overlap.entries;
    const int nt = static_cast<int>(O.rows());
    std::vector<int> order(static_cast<std::size_t>(nt));
    std::iota(order.begin(), order.end(), 0);
    const Eigen::Index col = static_cast<Eigen::Index>(n0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return O(a, col) * O(a, col) > O(b, col) * O(b, col);
    });
    double cum = 0.0;
    int kmin = order[0], kmax = order[0];
    for (int k : order) {
        cum += O(k, col) * O(k, col);
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
        if (cum >= 1.0 - tail) break;
    }
    Window w;
    w.lo = std::max(0, kmin - pad);
    w.hi = std::min(nt, kmax + pad + 1);
    return w;
}

}  // namespace

double evolve_rabi(const RabiProblem& problem, std::size_t n0, double delta_mw) {
    if (!problem.overlap || !problem.e1 || !problem.e2)
        throw NumericsError("rabi problem is missing its basis data");
    if (problem.rabi_omega <= 0.0) throw ConfigError("run.rabi_frequency_hz must be > 0");
    const Eigen::MatrixXd& O = problem.overlap->entries;
    if (static_cast<Eigen::Index>(n0) >= O.cols())
        throw NumericsError("initial state outside the overlap matrix");

    const Window w = select_window(*problem.overlap, n0, problem.window_tail, problem.window_pad);
    const int m = w.hi - w.lo;
    double covered = 0.0;
    for (int k = w.lo; k < w.hi; ++k) {
        const double v = O(k, static_cast<Eigen::Index>(n0));
        covered += v * v;
    }
    if (covered < 0.999)
        throw NumericsError("rabi window covers less than 99.9% of the transfer amplitude; enlarge the branch-2 basis");

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1 + m, 1 + m);
    h(0, 0) = (*problem.e1)[n0];
    for (int j = 0; j < m; ++j) {
        const int k = w.lo + j;
        h(1 + j, 1 + j) = (*problem.e2)[static_cast<std::size_t>(k)] - delta_mw;
        const double c = 0.5 * problem.rabi_omega * O(k, static_cast<Eigen::Index>(n0));
        h(0, 1 + j) = c;
        h(1 + j, 0) = c;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericsError("rabi eigensolve failed");
    const Eigen::VectorXd row0 = es.eigenvectors().row(0);
    Eigen::VectorXcd phased(1 + m);
    for (int j = 0; j < 1 + m; ++j) {
        phased[j] = row0[j] * std::polar(1.0, -es.eigenvalues()[j] * problem.pulse_duration);
    }
    const Eigen::VectorXcd amp = es.eigenvectors() * phased;

    double p2 = 0.0;
    for (int j = 1; j < 1 + m; ++j) p2 += std::norm(amp[j]);
    const double total = p2 + std::norm(amp[0]);
    if (std::abs(total - 1.0) > 1e-8)
        throw NumericsError("rabi propagation lost unitarity beyond 1e-8");
    return std::min(p2, 1.0);
}

std::vector<SpectrumPoint> scan_spectrum(const RabiProblem& problem,
                                         const ThermalEnsemble& ens,
                                         const std::vector<double>& detunings,
                                         unsigned threads,
                                         std::optional<std::size_t> max_states,
                                         std::uint64_t seed) {
    if (ens.mode != ThermalEnsemble::Mode::list1d)
        throw NumericsError("spectrum scans run on 1D list ensembles");
    std::vector<SpectrumPoint> out(detunings.size());
    parallel_for_indexed(detunings.size(), threads, [&](std::size_t i) {
        const double delta = detunings[i];
        const AverageResult avg = ensemble_average(
            ens,
            [&](int n, int) {
                return cplx(evolve_rabi(problem, static_cast<std::size_t>(n), delta), 0.0);
            },
            max_states, seed);
        SpectrumPoint pt;
        pt.detuning = delta;
        pt.p2 = avg.mean.real();
        pt.stderr_est = avg.stderr_est;
        out[i] = pt;
    });
    return out;
}

SpectrumAnalysis analyze_spectrum(const std::vector<SpectrumPoint>& spectrum,
                                  double carrier_mean, double carrier_halfwidth,
                                  const std::vector<double>& offsets) {
    if (spectrum.empty()) throw NumericsError("cannot analyze an empty spectrum");
    SpectrumAnalysis out;
    out.carrier_mean = carrier_mean;
    double best = -1.0;
    for (const SpectrumPoint& pt : spectrum) {
        if (std::abs(pt.detuning - carrier_mean) < carrier_halfwidth && pt.p2 > best) {
            best = pt.p2;
            out.carrier_detuning = pt.detuning;
            out.carrier_p2 = pt.p2;
        }
    }
    if (best < 0.0) throw NumericsError("no spectrum points inside the carrier search window");
    for (double off : offsets) {
        SpectrumAnalysis::Sideband sb;
        sb.offset = off;
        double peak = -1.0;
        for (const SpectrumPoint& pt : spectrum) {
            if (std::abs(pt.detuning - (out.carrier_detuning + off)) <= 0.1 * std::abs(off) &&
                pt.p2 > peak) {
                peak = pt.p2;
                sb.peak_detuning = pt.detuning;
                sb.p2 = pt.p2;
            }
        }
        if (peak < 0.0) throw NumericsError("no spectrum points inside a sideband search window");
        sb.ratio = out.carrier_p2 > 0.0 ? sb.p2 / out.carrier_p2 : 0.0;
        out.sidebands.push_back(sb);
    }
    return out;
}

}  // namespace echospec
