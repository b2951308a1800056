#include "echospec/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "echospec/errors.hpp"
#include "echospec/kernels.hpp"
#include "echospec/parallel.hpp"

namespace echospec {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

// Shared guts of the explicit-list builders.
ThermalEnsemble clipped_list(const std::vector<double>& energies, double kT,
                             double clip_ratio, ThermalEnsemble::Mode mode) {
    require(kT > 0.0, "ensemble temperature must give kT > 0 (trap.temperature_T)");
    require(clip_ratio > 0.0, "trap.clip_ratio must be > 0");
    require(!energies.empty(), "ensemble built from an empty spectrum");
    ThermalEnsemble ens;
    ens.mode = mode;
    ens.kT = kT;
    ens.clip_ratio = clip_ratio;
    const double e0 = *std::min_element(energies.begin(), energies.end());
    double wsum = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const double de = energies[i] - e0;
        if (!(de < clip_ratio * kT)) continue;
        ens.nx.push_back(static_cast<int>(i));
        ens.weights.push_back(std::exp(-de / kT));
        wsum += ens.weights.back();
    }
    if (ens.nx.empty()) throw ConfigError("no states below the clip energy; raise trap.temperature_T or trap.clip_ratio");
    for (double& w : ens.weights) w /= wsum;
    return ens;
}

}  // namespace

std::size_t ThermalEnsemble::n_states() const {
    if (mode == Mode::shell2d) {
        const std::size_t m = static_cast<std::size_t>(smax) + 1;
        return m * (m + 1) / 2;
    }
    return nx.size();
}

double ThermalEnsemble::weight_sum() const {
    if (mode == Mode::shell2d) {
        double acc = 0.0;
        for (int s = 0; s <= smax; ++s) acc += (s + 1) * shell_state_weight[static_cast<std::size_t>(s)];
        return acc;
    }
    double acc = 0.0;
    for (double w : weights) acc += w;
    return acc;
}

ThermalEnsemble thermal_ensemble_1d(const std::vector<double>& e1, double kT,
                                    double clip_ratio) {
    return clipped_list(e1, kT, clip_ratio, ThermalEnsemble::Mode::list1d);
}

ThermalEnsemble thermal_ensemble_2d(const std::vector<double>& e1x,
                                    const std::vector<double>& e1y, double kT,
                                    double clip_ratio) {
    require(kT > 0.0, "ensemble temperature must give kT > 0 (trap.temperature_T)");
    require(clip_ratio > 0.0, "trap.clip_ratio must be > 0");
    require(!e1x.empty() && !e1y.empty(), "ensemble built from an empty spectrum");
    ThermalEnsemble ens;
    ens.mode = ThermalEnsemble::Mode::grid2d;
    ens.kT = kT;
    ens.clip_ratio = clip_ratio;
    const double e0 = *std::min_element(e1x.begin(), e1x.end()) +
                      *std::min_element(e1y.begin(), e1y.end());
    double wsum = 0.0;
    // Ascending-energy enumeration keeps the summation order deterministic.
    for (std::size_t i = 0; i < e1x.size(); ++i) {
        for (std::size_t j = 0; j < e1y.size(); ++j) {
            const double de = e1x[i] + e1y[j] - e0;
            if (!(de < clip_ratio * kT)) continue;
            ens.nx.push_back(static_cast<int>(i));
            ens.ny.push_back(static_cast<int>(j));
            ens.weights.push_back(std::exp(-de / kT));
            wsum += ens.weights.back();
        }
    }
    if (ens.nx.empty()) throw ConfigError("no states below the clip energy; raise trap.temperature_T or trap.clip_ratio");
    for (double& w : ens.weights) w /= wsum;
    return ens;
}

ThermalEnsemble thermal_shell_ensemble(double omega1, double kT, double clip_ratio) {
    require(omega1 > 0.0, "shell ensemble needs a positive level spacing");
    require(kT > 0.0, "ensemble temperature must give kT > 0 (trap.temperature_T)");
    require(clip_ratio > 0.0, "trap.clip_ratio must be > 0");
    ThermalEnsemble ens;
    ens.mode = ThermalEnsemble::Mode::shell2d;
    ens.kT = kT;
    ens.clip_ratio = clip_ratio;
    int smax = -1;
    while (omega1 * (smax + 1) < clip_ratio * kT) ++smax;
    if (smax < 0) throw ConfigError("no states below the clip energy; raise trap.temperature_T or trap.clip_ratio");
    ens.smax = smax;
    ens.shell_state_weight.resize(static_cast<std::size_t>(smax) + 1);
    double z = 0.0;
    for (int s = 0; s <= smax; ++s) {
        const double w = std::exp(-omega1 * s / kT);
        ens.shell_state_weight[static_cast<std::size_t>(s)] = w;
        z += (s + 1) * w;
    }
    for (double& w : ens.shell_state_weight) w /= z;
    return ens;
}

AverageResult ensemble_average(const ThermalEnsemble& ens,
                               const std::function<cplx(int, int)>& fn,
                               std::optional<std::size_t> max_states,
                               std::uint64_t seed) {
    AverageResult res;
    res.seed = seed;
    const std::size_t n = ens.n_states();
    if (!max_states || n <= *max_states) {
        cplx acc(0.0, 0.0);
        if (ens.mode == ThermalEnsemble::Mode::shell2d) {
            for (int s = 0; s <= ens.smax; ++s) {
                const double w = ens.shell_state_weight[static_cast<std::size_t>(s)];
                for (int i = 0; i <= s; ++i) acc += w * fn(i, s - i);
            }
        } else {
            for (std::size_t i = 0; i < ens.nx.size(); ++i) {
                const int ny = ens.ny.empty() ? 0 : ens.ny[i];
                acc += ens.weights[i] * fn(ens.nx[i], ny);
            }
        }
        res.mean = acc;
        res.evaluations = n;
        return res;
    }

    // Systematic stratified draw: m equal-weight strata of the cumulative
    // distribution, one sample each at a common random offset. Selection
    // probability is proportional to weight, so the plain sample mean is
    // the estimator.
    const std::size_t m = std::max<std::size_t>(*max_states, 2);
    std::mt19937_64 rng(seed);
    const double u0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<cplx> samples(m);

    if (ens.mode == ThermalEnsemble::Mode::shell2d) {
        std::vector<double> shell_cum(static_cast<std::size_t>(ens.smax) + 1);
        double run = 0.0;
        for (int s = 0; s <= ens.smax; ++s) {
            run += (s + 1) * ens.shell_state_weight[static_cast<std::size_t>(s)];
            shell_cum[static_cast<std::size_t>(s)] = run;
        }
        int s = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = (static_cast<double>(j) + u0) / static_cast<double>(m) * run;
            while (s < ens.smax && shell_cum[static_cast<std::size_t>(s)] <= t) ++s;
            const double lo = s == 0 ? 0.0 : shell_cum[static_cast<std::size_t>(s) - 1];
            const double within = (t - lo) / ens.shell_state_weight[static_cast<std::size_t>(s)];
            const int i = std::min(s, static_cast<int>(within));
            samples[j] = fn(i, s - i);
        }
    } else {
        std::vector<double> cum(ens.weights.size());
        double run = 0.0;
        for (std::size_t i = 0; i < ens.weights.size(); ++i) {
            run += ens.weights[i];
            cum[i] = run;
        }
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = (static_cast<double>(j) + u0) / static_cast<double>(m) * run;
            while (idx + 1 < cum.size() && cum[idx] <= t) ++idx;
            const int ny = ens.ny.empty() ? 0 : ens.ny[idx];
            samples[j] = fn(ens.nx[idx], ny);
        }
    }

    cplx mean(0.0, 0.0);
    for (const cplx& v : samples) mean += v;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (const cplx& v : samples) var += std::norm(v - mean);
    var /= static_cast<double>(m - 1);
    res.mean = mean;
    res.stderr_est = std::sqrt(var / static_cast<double>(m));
    res.subsampled = true;
    res.evaluations = m;
    return res;
}

cplx shell_average_product(const ThermalEnsemble& ens, const std::vector<cplx>& ax,
                           const std::vector<cplx>& ay) {
    if (ens.mode != ThermalEnsemble::Mode::shell2d)
        throw NumericsError("shell average requested on a non-shell ensemble");
    const std::size_t nbs = static_cast<std::size_t>(ens.smax) + 1;
    if (ax.size() < nbs || ay.size() < nbs)
        throw NumericsError("per-axis arrays shorter than the shell count");
    std::vector<cplx> ayr(nbs);
    for (std::size_t k = 0; k < nbs; ++k) ayr[k] = ay[nbs - 1 - k];
    cplx acc(0.0, 0.0);
    for (std::size_t s = 0; s < nbs; ++s) {
        const cplx conv = kernels::cplx_dot(ax.data(), ayr.data() + (nbs - 1 - s), s + 1);
        acc += ens.shell_state_weight[s] * conv;
    }
    return acc;
}

double shell_average_product(const ThermalEnsemble& ens, const std::vector<double>& ax,
                             const std::vector<double>& ay) {
    if (ens.mode != ThermalEnsemble::Mode::shell2d)
        throw NumericsError("shell average requested on a non-shell ensemble");
    const std::size_t nbs = static_cast<std::size_t>(ens.smax) + 1;
    if (ax.size() < nbs || ay.size() < nbs)
        throw NumericsError("per-axis arrays shorter than the shell count");
    std::vector<double> ayr(nbs);
    for (std::size_t k = 0; k < nbs; ++k) ayr[k] = ay[nbs - 1 - k];
    double acc = 0.0;
    for (std::size_t s = 0; s < nbs; ++s) {
        acc += ens.shell_state_weight[s] *
               kernels::dot(ax.data(), ayr.data() + (nbs - 1 - s), s + 1);
    }
    return acc;
}

DephasingEstimate dephasing_estimate(const ThermalEnsemble& ens,
                                     const std::vector<double>& nu_x,
                                     const std::vector<double>& nu_y) {
    DephasingEstimate out;
    double mean = 0.0, m2 = 0.0;
    switch (ens.mode) {
        case ThermalEnsemble::Mode::list1d: {
            for (std::size_t i = 0; i < ens.nx.size(); ++i) {
                const double nu = nu_x.at(static_cast<std::size_t>(ens.nx[i]));
                mean += ens.weights[i] * nu;
                m2 += ens.weights[i] * nu * nu;
            }
            break;
        }
        case ThermalEnsemble::Mode::grid2d: {
            for (std::size_t i = 0; i < ens.nx.size(); ++i) {
                const double nu = nu_x.at(static_cast<std::size_t>(ens.nx[i])) +
                                  nu_y.at(static_cast<std::size_t>(ens.ny[i]));
                mean += ens.weights[i] * nu;
                m2 += ens.weights[i] * nu * nu;
            }
            break;
        }
        case ThermalEnsemble::Mode::shell2d: {
            const std::size_t nbs = static_cast<std::size_t>(ens.smax) + 1;
            if (nu_x.size() < nbs || nu_y.size() < nbs)
                throw NumericsError("per-axis shift arrays shorter than the shell count");
            std::vector<double> nyr(nbs);
            for (std::size_t k = 0; k < nbs; ++k) nyr[k] = nu_y[nbs - 1 - k];
            double sx1 = 0.0, sy1 = 0.0, sx2 = 0.0, sy2 = 0.0;
            for (std::size_t s = 0; s < nbs; ++s) {
                sx1 += nu_x[s];
                sy1 += nu_y[s];
                sx2 += nu_x[s] * nu_x[s];
                sy2 += nu_y[s] * nu_y[s];
                const double cross = kernels::dot(nu_x.data(), nyr.data() + (nbs - 1 - s), s + 1);
                const double w = ens.shell_state_weight[s];
                mean += w * (sx1 + sy1);
                m2 += w * (sx2 + sy2 + 2.0 * cross);
            }
            break;
        }
    }
    out.mean_shift = mean;
    const double var = std::max(0.0, m2 - mean * mean);
    out.delta_rms = std::sqrt(var);
    out.degenerate = ens.single_state();
    out.decay_time = out.delta_rms > 0.0 ? 1.0 / (2.0 * out.delta_rms)
                                         : std::numeric_limits<double>::infinity();
    return out;
}

BandedOverlap banded_harmonic_overlap(int nb, double a1, double a2, double d,
                                      double band_tol) {
    if (nb < 1) throw NumericsError("banded overlap needs at least one column");
    for (int half = 8;; half *= 2) {
        const int nt = nb + 2 * half;
        const Eigen::MatrixXd full = harmonic_overlap_recursion(nt, nt, a1, a2, d);
        BandedOverlap bo;
        bo.nb = nb;
        bo.nt = nt;
        bo.half_band = half;
        bo.diag.assign(static_cast<std::size_t>(2 * half) + 1,
                       std::vector<double>(static_cast<std::size_t>(nt), 0.0));
        for (int j = -half; j <= half; ++j) {
            std::vector<double>& v = bo.diag[static_cast<std::size_t>(j + half)];
            const int lo = std::max(0, -j);
            const int hi = std::min(nt, nt - j);
            for (int n = lo; n < hi; ++n) v[static_cast<std::size_t>(n)] = full(n + j, n);
        }
        double worst = 0.0;
        for (int n = 0; n < nb; ++n) {
            double colnorm = 0.0;
            for (int j = -half; j <= half; ++j) {
                const double v = bo.offset(j)[n];
                colnorm += v * v;
            }
            worst = std::max(worst, 1.0 - colnorm);
        }
        bo.residual = worst;
        if (worst <= band_tol) return bo;
        if (half >= 4096 || half >= nb)
            throw NumericsError("overlap band does not converge; the branch mismatch is too large for the banded engine");
    }
}

HarmonicAxisPair make_axis_pair(const AxisPotential& h1, const AxisPotential& h2,
                                int nb, double band_tol) {
    if (h1.kind != AxisPotential::Kind::harmonic || h2.kind != AxisPotential::Kind::harmonic)
        throw NumericsError("axis pair requires harmonic surrogate potentials");
    HarmonicAxisPair ax;
    ax.omega1 = h1.omega;
    ax.omega2 = h2.omega;
    ax.dv0 = h2.v0 - h1.v0;
    ax.band = banded_harmonic_overlap(nb, h1.mass * h1.omega, h2.mass * h2.omega,
                                      h2.center - h1.center, band_tol);
    return ax;
}

std::vector<cplx> banded_ramsey_axis(const HarmonicAxisPair& axis, double tau) {
    const BandedOverlap& bo = axis.band;
    const int nb = bo.nb, nt = bo.nt, half = bo.half_band;
    std::vector<cplx> u(static_cast<std::size_t>(nt));
    for (int k = 0; k < nt; ++k) u[static_cast<std::size_t>(k)] = std::polar(1.0, -axis.omega2 * k * tau);
    std::vector<cplx> r(static_cast<std::size_t>(nb), cplx(0.0, 0.0));
    for (int g = -half; g <= half; ++g) {
        const int lo = std::max(0, -g);
        const int hi = nb;  // n + g <= nb - 1 + half < nt always
        if (hi <= lo) continue;
        const double* a = bo.offset(g);
        kernels::triad_accum(r.data() + lo, a + lo, a + lo, u.data() + lo + g,
                             static_cast<std::size_t>(hi - lo));
    }
    const cplx global = std::polar(1.0, -(0.5 * (axis.omega2 - axis.omega1) + axis.dv0) * tau);
    for (int n = 0; n < nb; ++n) {
        r[static_cast<std::size_t>(n)] *= global * std::polar(1.0, axis.omega1 * n * tau);
    }
    return r;
}

std::vector<cplx> banded_echo_axis(const HarmonicAxisPair& axis, double tau) {
    const BandedOverlap& bo = axis.band;
    const int nb = bo.nb, nt = bo.nt, half = bo.half_band;
    std::vector<cplx> u(static_cast<std::size_t>(nt));
    for (int k = 0; k < nt; ++k) u[static_cast<std::size_t>(k)] = std::polar(1.0, -axis.omega2 * k * tau);
    std::vector<cplx> acc(static_cast<std::size_t>(nb), cplx(0.0, 0.0));
    std::vector<cplx> gd(static_cast<std::size_t>(nt));
    for (int dd = -2 * half; dd <= 2 * half; ++dd) {
        std::fill(gd.begin(), gd.end(), cplx(0.0, 0.0));
        bool touched = false;
        for (int gg = std::max(-half, dd - half); gg <= std::min(half, dd + half); ++gg) {
            const int lo = std::max(std::max(0, -dd), -gg);
            const int hi = std::min(std::min(nt, nt - dd), nt - gg);
            if (hi <= lo) continue;
            kernels::triad_accum(gd.data() + lo, bo.offset(gg - dd) + lo + dd,
                                 bo.offset(gg) + lo, u.data() + lo + gg,
                                 static_cast<std::size_t>(hi - lo));
            touched = true;
        }
        if (!touched) continue;
        const cplx phase = std::polar(1.0, -axis.omega1 * dd * tau);
        kernels::abs2_accum(acc.data(), gd.data(), phase, static_cast<std::size_t>(nb));
    }
    return acc;
}

namespace {

cplx trace_mean(const ThermalEnsemble& ens, const std::vector<cplx>& ax,
                const std::vector<cplx>* ay) {
    switch (ens.mode) {
        case ThermalEnsemble::Mode::list1d: {
            cplx acc(0.0, 0.0);
            for (std::size_t i = 0; i < ens.nx.size(); ++i)
                acc += ens.weights[i] * ax.at(static_cast<std::size_t>(ens.nx[i]));
            return acc;
        }
        case ThermalEnsemble::Mode::grid2d: {
            if (!ay) throw NumericsError("2D ensemble trace needs both axes");
            cplx acc(0.0, 0.0);
            for (std::size_t i = 0; i < ens.nx.size(); ++i)
                acc += ens.weights[i] * ax.at(static_cast<std::size_t>(ens.nx[i])) *
                       ay->at(static_cast<std::size_t>(ens.ny[i]));
            return acc;
        }
        case ThermalEnsemble::Mode::shell2d:
            if (!ay) throw NumericsError("2D ensemble trace needs both axes");
            return shell_average_product(ens, ax, *ay);
    }
    throw NumericsError("unreachable ensemble mode");
}

double clamp_probability(double p) {
    if (p < 0.0) {
        if (p < -1e-9) throw NumericsError("probability below zero beyond rounding tolerance");
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + 1e-9) throw NumericsError("probability above one beyond rounding tolerance");
        return 1.0;
    }
    return p;
}

}  // namespace

std::vector<TracePoint> ensemble_ramsey_trace(const ThermalEnsemble& ens,
                                              const HarmonicAxisPair& ax,
                                              const HarmonicAxisPair* ay,
                                              const std::vector<double>& taus,
                                              double delta_mw, unsigned threads) {
    std::vector<TracePoint> out(taus.size());
    parallel_for_indexed(taus.size(), threads, [&](std::size_t i) {
        const double tau = taus[i];
        const std::vector<cplx> a_x = banded_ramsey_axis(ax, tau);
        std::vector<cplx> a_y;
        if (ay) a_y = banded_ramsey_axis(*ay, tau);
        const cplx mean = trace_mean(ens, a_x, ay ? &a_y : nullptr);
        TracePoint pt;
        pt.tau = tau;
        pt.contrast = std::abs(mean);
        pt.p2 = clamp_probability(0.5 * (1.0 + (mean * std::polar(1.0, delta_mw * tau)).real()));
        out[i] = pt;
    });
    return out;
}

std::vector<TracePoint> ensemble_echo_trace(const ThermalEnsemble& ens,
                                            const HarmonicAxisPair& ax,
                                            const HarmonicAxisPair* ay,
                                            const std::vector<double>& taus,
                                            unsigned threads) {
    std::vector<TracePoint> out(taus.size());
    parallel_for_indexed(taus.size(), threads, [&](std::size_t i) {
        const double tau = taus[i];
        const std::vector<cplx> a_x = banded_echo_axis(ax, tau);
        std::vector<cplx> a_y;
        if (ay) a_y = banded_echo_axis(*ay, tau);
        const cplx mean = trace_mean(ens, a_x, ay ? &a_y : nullptr);
        TracePoint pt;
        pt.tau = tau;
        pt.contrast = std::abs(mean);
        pt.p2 = clamp_probability(0.5 * (1.0 - mean.real()));
        out[i] = pt;
    });
    return out;
}

std::vector<TracePoint> ensemble_ramsey_trace_dense(const ThermalEnsemble& ens,
                                                    const OverlapMatrix& overlap,
                                                    const std::vector<double>& e1,
                                                    const std::vector<double>& e2,
                                                    const std::vector<double>& taus,
                                                    double delta_mw, unsigned threads) {
    if (ens.mode != ThermalEnsemble::Mode::list1d)
        throw NumericsError("dense traces support 1D list ensembles only");
    std::vector<TracePoint> out(taus.size());
    parallel_for_indexed(taus.size(), threads, [&](std::size_t i) {
        const double tau = taus[i];
        cplx mean(0.0, 0.0);
        for (std::size_t s = 0; s < ens.nx.size(); ++s) {
            mean += ens.weights[s] *
                    ramsey_amplitude(overlap, e1, e2, static_cast<std::size_t>(ens.nx[s]), tau);
        }
        TracePoint pt;
        pt.tau = tau;
        pt.contrast = std::abs(mean);
        pt.p2 = clamp_probability(0.5 * (1.0 + (mean * std::polar(1.0, delta_mw * tau)).real()));
        out[i] = pt;
    });
    return out;
}

std::vector<TracePoint> ensemble_echo_trace_dense(const ThermalEnsemble& ens,
                                                  const OverlapMatrix& overlap,
                                                  const std::vector<double>& e1,
                                                  const std::vector<double>& e2,
                                                  const std::vector<double>& taus,
                                                  unsigned threads) {
    if (ens.mode != ThermalEnsemble::Mode::list1d)
        throw NumericsError("dense traces support 1D list ensembles only");
    std::vector<TracePoint> out(taus.size());
    parallel_for_indexed(taus.size(), threads, [&](std::size_t i) {
        const double tau = taus[i];
        cplx mean(0.0, 0.0);
        for (std::size_t s = 0; s < ens.nx.size(); ++s) {
            mean += ens.weights[s] *
                    echo_amplitude(overlap, e1, e2, static_cast<std::size_t>(ens.nx[s]), tau);
        }
        TracePoint pt;
        pt.tau = tau;
        pt.contrast = std::abs(mean);
        pt.p2 = clamp_probability(0.5 * (1.0 - mean.real()));
        out[i] = pt;
    });
    return out;
}

std::vector<StabilityPoint> stability_curve(const std::vector<double>& epsilons,
                                            const std::function<AxisDiagonals(double)>& builder,
                                            const ThermalEnsemble& ens) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (epsilons[i] < 0.0) throw ConfigError("stability curve epsilon values must be >= 0");
        if (i > 0 && epsilons[i] <= epsilons[i - 1])
            throw ConfigError("stability curve epsilon values must be strictly ascending");
    }
    std::vector<StabilityPoint> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        const AxisDiagonals diags = builder(eps);
        std::vector<double> fx(diags.onn_x.size());
        for (std::size_t i = 0; i < fx.size(); ++i) {
            const double v = diags.onn_x[i];
            fx[i] = v * v * v * v;
        }
        double avg = 0.0;
        if (ens.mode == ThermalEnsemble::Mode::list1d) {
            for (std::size_t i = 0; i < ens.nx.size(); ++i)
                avg += ens.weights[i] * fx.at(static_cast<std::size_t>(ens.nx[i]));
        } else {
            std::vector<double> fy(diags.onn_y.size());
            for (std::size_t i = 0; i < fy.size(); ++i) {
                const double v = diags.onn_y[i];
                fy[i] = v * v * v * v;
            }
            if (ens.mode == ThermalEnsemble::Mode::shell2d) {
                avg = shell_average_product(ens, fx, fy);
            } else {
                for (std::size_t i = 0; i < ens.nx.size(); ++i)
                    avg += ens.weights[i] * fx.at(static_cast<std::size_t>(ens.nx[i])) *
                           fy.at(static_cast<std::size_t>(ens.ny[i]));
            }
        }
        StabilityPoint pt;
        pt.epsilon = eps;
        pt.avg_onn4 = avg;
        pt.p2_longtime = 0.5 * (1.0 - avg);
        pt.stderr_est = 0.0;
        out.push_back(pt);
    }
    return out;
}

}  // namespace echospec
