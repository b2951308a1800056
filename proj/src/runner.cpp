#include "echospec/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "echospec/config.hpp"
#include "echospec/constants.hpp"
#include "echospec/ensemble.hpp"
#include "echospec/errors.hpp"
#include "echospec/io.hpp"
#include "echospec/kernels.hpp"
#include "echospec/potentials.hpp"
#include "echospec/spectral.hpp"
#include "echospec/spectroscopy.hpp"

namespace echospec {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---- reduced-scale ("desk") model ------------------------------------------
//
// Fast presets run a reduced copy of the trap: mass 22500 internal, so the
// breathing ladder holds ~75 thermal levels instead of ~2250. The physics is
// preserved by keeping the products that control the dynamics invariant:
// eps * n_thermal (branch frequency mismatch accumulated over the ladder) and
// (sag/ground-width) * sqrt(n_thermal). With n scaled down by 30 that means
// eps scales up by 30 and the sag ratio by sqrt(30). Times are reported in
// physical seconds through the breathing-frequency map.
constexpr double desk_mass = 22500.0;
constexpr double desk_eps_scale = 30.0;
constexpr double desk_nbar = 50.0;

struct Artifact {
    fs::path path;
    std::string name;
};

struct RunContext {
    RunOptions opt;
    LoadedConfig cfg;
    unsigned threads = 1;
    fs::path out;
    std::vector<Artifact> artifacts;
    json meta_run = json::object();
    json derived = json::object();

    std::string track(const std::string& name) {
        artifacts.push_back({out / name, name});
        return (out / name).string();
    }
    void purge() noexcept {
        for (const auto& a : artifacts) {
            std::error_code ec;
            fs::remove(a.path, ec);
        }
    }
};

// ---- run-section knobs ------------------------------------------------------

void check_run_keys(const json& run, std::initializer_list<const char*> allowed) {
    for (auto it = run.begin(); it != run.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("run." + it.key() + " is not a recognized field for this preset");
    }
}

double knob_num(const json& run, const std::string& key, double dflt) {
    if (!run.contains(key) || run.at(key).is_null()) return dflt;
    if (!run.at(key).is_number()) throw ConfigError("run." + key + " must be a number");
    return run.at(key).get<double>();
}

std::optional<double> knob_opt(const json& run, const std::string& key) {
    if (!run.contains(key) || run.at(key).is_null()) return std::nullopt;
    if (!run.at(key).is_number()) throw ConfigError("run." + key + " must be a number or null");
    return run.at(key).get<double>();
}

int knob_int(const json& run, const std::string& key, int dflt, int lo, int hi) {
    if (!run.contains(key) || run.at(key).is_null()) return dflt;
    if (!run.at(key).is_number_integer()) throw ConfigError("run." + key + " must be an integer");
    long long v = run.at(key).get<long long>();
    if (v < lo || v > hi)
        throw ConfigError("run." + key + " must be in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    return static_cast<int>(v);
}

bool knob_bool(const json& run, const std::string& key, bool dflt) {
    if (!run.contains(key) || run.at(key).is_null()) return dflt;
    if (!run.at(key).is_boolean()) throw ConfigError("run." + key + " must be a boolean");
    return run.at(key).get<bool>();
}

std::vector<double> knob_vec(const json& run, const std::string& key, std::vector<double> dflt) {
    if (!run.contains(key) || run.at(key).is_null()) return dflt;
    const json& v = run.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError("run." + key + " must be a non-empty array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("run." + key + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// ---- small numeric helpers --------------------------------------------------

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> with_inserted(std::vector<double> v, std::initializer_list<double> extra) {
    v.insert(v.end(), extra);
    std::sort(v.begin(), v.end());
    return v;
}

std::size_t nearest_index(const std::vector<double>& v, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::fabs(v[i] - x) < std::fabs(v[best] - x)) best = i;
    return best;
}

std::vector<double> harmonic_levels(double omega, double v0, int n) {
    std::vector<double> e(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) e[static_cast<std::size_t>(k)] = omega * (k + 0.5) + v0;
    return e;
}

AxisPotential analytic_axis(const std::string& label, double mass, double omega, double center) {
    AxisPotential ax;
    ax.kind = AxisPotential::Kind::harmonic;
    ax.label = label;
    ax.mass = mass;
    ax.omega = omega;
    ax.center = center;
    ax.v0 = 0.0;
    return ax;
}

std::vector<double> band_diag(const HarmonicAxisPair& a, int nb) {
    return std::vector<double>(a.band.offset(0), a.band.offset(0) + nb);
}

// ---- physical-scale model ---------------------------------------------------

struct PaperModel {
    double eps = 0.0;
    UnitScales units{};
    PotentialPair harm;  // harmonic surrogate of the Gaussian pair
    double omega1 = 0.0; // internal
    double kT = 0.0;     // internal
    double omega1_si = 0.0;

    const AxisPotential& axis1(std::size_t i) const { return harm.v1.at(i); }
    const AxisPotential& axis2(std::size_t i) const { return harm.v2.at(i); }
    std::size_t naxes() const { return harm.v1.size(); }
};

PaperModel make_paper(const LoadedConfig& cfg) {
    PaperModel m;
    m.units = natural_units(cfg.constants, cfg.trap);
    m.eps = resolve_epsilon(cfg.trap, cfg.constants);
    PotentialPair gauss = build_pair(cfg.trap, cfg.numerics, cfg.constants);
    m.harm = harmonic_surrogate(gauss);
    m.omega1 = m.harm.v1[0].omega;
    m.kT = m.units.to_internal_energy(cfg.constants.k_B * cfg.trap.temperature_T);
    m.omega1_si = m.units.from_internal_omega(m.omega1);
    return m;
}

LoadedConfig with_eps(const LoadedConfig& cfg, double eps) {
    LoadedConfig c2 = cfg;
    c2.trap.epsilon_override = eps;
    c2.trap.wavelength_lambda.reset();
    return c2;
}

LoadedConfig with_lambda(const LoadedConfig& cfg, double lambda_m) {
    LoadedConfig c2 = cfg;
    c2.trap.wavelength_lambda = lambda_m;
    c2.trap.epsilon_override.reset();
    return c2;
}

struct DeskModel {
    double eps_paper = 0.0;
    double eps = 0.0;    // scaled branch mismatch
    double omega1 = 0.0; // internal (= 2/sqrt(mass))
    double omega2 = 0.0;
    double kT = 0.0;
    double a1 = 0.0;  // ground-state width
    double dov = 0.0; // vertical sag displacement / a1
    double omega1_si = 0.0;
    // seconds per internal time unit via the breathing-frequency map
    double t_to_s = 0.0;
};

DeskModel make_desk(const LoadedConfig& cfg) {
    DeskModel d;
    d.eps_paper = resolve_epsilon(cfg.trap, cfg.constants);
    d.eps = desk_eps_scale * d.eps_paper;
    if (!(d.eps < 0.6))
        throw ConfigError("trap epsilon " + std::to_string(d.eps_paper) +
                          " is too large for the reduced-scale model; stay below 0.02");
    d.omega1 = 2.0 / std::sqrt(desk_mass);
    d.omega2 = d.omega1 * std::sqrt(1.0 + d.eps);
    d.kT = desk_nbar * d.omega1;
    d.a1 = 1.0 / std::sqrt(desk_mass * d.omega1);

    // vertical sag ratio of the physical trap, scaled by sqrt(desk_eps_scale)
    LoadedConfig c1 = cfg;
    c1.numerics.dimensionality = 1;
    PaperModel p = make_paper(c1);
    const AxisPotential& y1 = p.axis1(0);
    const AxisPotential& y2 = p.axis2(0);
    const double a1_paper = 1.0 / std::sqrt(y1.mass * y1.omega);
    const double sag_ratio_paper = (y2.center - y1.center) / a1_paper;
    d.dov = std::sqrt(desk_eps_scale) * sag_ratio_paper;
    d.omega1_si = p.omega1_si;
    d.t_to_s = d.omega1 / d.omega1_si;
    return d;
}

HarmonicAxisPair desk_axis_pair(const DeskModel& d, const std::string& label, int nb,
                                bool vertical) {
    AxisPotential h1 = analytic_axis(label, desk_mass, d.omega1, 0.0);
    AxisPotential h2 =
        analytic_axis(label, desk_mass, d.omega2, vertical ? d.dov * d.a1 : 0.0);
    return make_axis_pair(h1, h2, nb);
}

// ---- shared output helpers --------------------------------------------------

CsvTable trace_table(const std::vector<TracePoint>& tr, double t_to_s, const std::string& tag,
                     std::vector<std::string> comments) {
    CsvTable t;
    t.comments = std::move(comments);
    t.columns = {"tau_s", "P2", "contrast", "n_index_or_ensemble"};
    for (const auto& p : tr)
        t.rows.push_back({csv_num(p.tau * t_to_s), csv_num(p.p2), csv_num(p.contrast), tag});
    return t;
}

json band_json(const HarmonicAxisPair& a) {
    json j;
    j["half_band"] = a.band.half_band;
    j["residual"] = a.band.residual;
    return j;
}

void write_trace_plot(RunContext& c, const std::string& name, const PlotSpec& spec) {
    write_svg_plot(c.track(name), spec);
}

double interp_crossing(const std::vector<double>& taus, const std::vector<TracePoint>& tr,
                       double level, bool* found) {
    *found = false;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr[i].contrast < level) {
            *found = true;
            if (i == 0) return taus[0];
            const double c0 = tr[i - 1].contrast, c1 = tr[i].contrast;
            const double f = (c0 - level) / (c0 - c1);
            return taus[i - 1] + f * (taus[i] - taus[i - 1]);
        }
    }
    return 0.0;
}

// ---- presets ----------------------------------------------------------------

void preset_ramsey_decay(RunContext& c) {
    check_run_keys(c.cfg.run, {"tau_points", "tau_max_decay_multiples", "detuning_hz"});
    const int tp = knob_int(c.cfg.run, "tau_points", 900, 2, 200000);
    const double mult = knob_num(c.cfg.run, "tau_max_decay_multiples", 9.0);
    if (!(mult > 0)) throw ConfigError("run.tau_max_decay_multiples must be > 0");
    const std::optional<double> det_hz = knob_opt(c.cfg.run, "detuning_hz");
    c.meta_run["tau_points"] = tp;
    c.meta_run["tau_max_decay_multiples"] = mult;

    PaperModel m = make_paper(c.cfg);
    const bool two_d = c.cfg.numerics.dimensionality == 2;

    ThermalEnsemble ens;
    if (two_d) {
        ens = thermal_shell_ensemble(m.omega1, m.kT, c.cfg.trap.clip_ratio);
    } else {
        const int guess =
            static_cast<int>(std::ceil(c.cfg.trap.clip_ratio * m.kT / m.omega1)) + 2;
        ens = thermal_ensemble_1d(harmonic_levels(m.omega1, m.axis1(0).v0, guess), m.kT,
                                  c.cfg.trap.clip_ratio);
    }
    const int nb = two_d ? ens.smax + 1 : static_cast<int>(ens.n_states());

    HarmonicAxisPair ax = make_axis_pair(m.axis1(0), m.axis2(0), nb);
    std::optional<HarmonicAxisPair> ay;
    if (two_d) ay = make_axis_pair(m.axis1(1), m.axis2(1), nb);

    auto nu_of = [&](const HarmonicAxisPair& a) {
        std::vector<double> nu(static_cast<std::size_t>(nb));
        for (int n = 0; n < nb; ++n)
            nu[static_cast<std::size_t>(n)] = (a.omega2 - a.omega1) * (n + 0.5) + a.dv0;
        return nu;
    };
    const std::vector<double> nux = nu_of(ax);
    const std::vector<double> nuy = ay ? nu_of(*ay) : std::vector<double>{};
    DephasingEstimate est = dephasing_estimate(ens, nux, nuy);

    const double delta_mw =
        det_hz ? m.units.to_internal_omega(2.0 * pi * *det_hz) : est.mean_shift;

    double tau_max;
    if (std::isfinite(est.decay_time))
        tau_max = mult * est.decay_time;
    else
        tau_max = mult * 2.0 * pi / m.omega1; // degenerate branches: flat contrast
    const std::vector<double> taus = linspace(1e-4 / m.omega1, tau_max, tp);

    std::vector<TracePoint> tr =
        ensemble_ramsey_trace(ens, ax, ay ? &*ay : nullptr, taus, delta_mw, c.threads);

    bool found = false;
    const double crossing = interp_crossing(taus, tr, std::exp(-1.0), &found);

    c.derived["epsilon"] = m.eps;
    c.derived["omega1_rad_s"] = m.omega1_si;
    c.derived["omega2_over_omega1"] = std::sqrt(1.0 + m.eps);
    c.derived["nbar"] = m.kT / m.omega1;
    c.derived["n_states"] = ens.n_states();
    if (two_d) c.derived["smax"] = ens.smax;
    c.derived["delta_rms_rad_s"] = m.units.from_internal_omega(est.delta_rms);
    c.derived["predicted_decay_time_s"] =
        std::isfinite(est.decay_time) ? json(est.decay_time * m.units.time_s) : json(nullptr);
    c.derived["mean_shift_hz"] = m.units.from_internal_omega(est.mean_shift) / (2.0 * pi);
    c.derived["detuning_applied_hz"] = m.units.from_internal_omega(delta_mw) / (2.0 * pi);
    c.derived["contrast_1e_crossing_s"] =
        found ? json(crossing * m.units.time_s) : json(nullptr);
    if (found && std::isfinite(est.decay_time))
        c.derived["crossing_over_predicted"] = crossing / est.decay_time;
    c.derived["band_x"] = band_json(ax);
    if (ay) c.derived["band_y"] = band_json(*ay);

    write_csv(c.track("trace.csv"),
              trace_table(tr, m.units.time_s, "ensemble",
                          {"ramsey fringe trace, thermal ensemble",
                           "tau_s: free-evolution time between the two pi/2 pulses, seconds",
                           "contrast: |<A>| over the ensemble"}));

    if (c.opt.plot) {
        PlotSpec spec;
        spec.title = "Ramsey contrast decay";
        spec.xlabel = "tau (s)";
        spec.ylabel = "P2 / contrast";
        PlotSeries sp2{"P2", {}, {}}, sc{"contrast", {}, {}};
        for (const auto& p : tr) {
            sp2.x.push_back(p.tau * m.units.time_s);
            sp2.y.push_back(p.p2);
            sc.x.push_back(p.tau * m.units.time_s);
            sc.y.push_back(p.contrast);
        }
        spec.series = {sp2, sc};
        if (std::isfinite(est.decay_time)) spec.marker_x = est.decay_time * m.units.time_s;
        write_trace_plot(c, "trace.svg", spec);
    }
}

void run_echo_axes(RunContext& c, const ThermalEnsemble& ens, const HarmonicAxisPair& ax,
                   const HarmonicAxisPair* ay, std::vector<double> taus, double omega2,
                   double t_to_s) {
    std::vector<TracePoint> tr = ensemble_echo_trace(ens, ax, ay, taus, c.threads);

    const std::size_t ih = nearest_index(taus, pi / omega2);
    const std::size_t iff = nearest_index(taus, 2.0 * pi / omega2);
    double pmax = 0.0;
    for (const auto& p : tr) pmax = std::max(pmax, p.p2);

    c.derived["p2_half_revival"] = tr[ih].p2;
    c.derived["p2_full_revival"] = tr[iff].p2;
    c.derived["tau_half_revival_s"] = taus[ih] * t_to_s;
    c.derived["tau_full_revival_s"] = taus[iff] * t_to_s;
    c.derived["max_p2"] = pmax;
    c.derived["band_x"] = band_json(ax);
    if (ay) c.derived["band_y"] = band_json(*ay);

    write_csv(c.track("trace.csv"),
              trace_table(tr, t_to_s, "ensemble",
                          {"spin-echo trace, thermal ensemble",
                           "tau_s: total sequence time 2*tau_delay, reported per delay arm",
                           "contrast: |<A>| over the ensemble"}));

    if (c.opt.plot) {
        PlotSpec spec;
        spec.title = "Echo response vs delay";
        spec.xlabel = "tau (s)";
        spec.ylabel = "P2";
        PlotSeries s{"P2", {}, {}};
        for (const auto& p : tr) {
            s.x.push_back(p.tau * t_to_s);
            s.y.push_back(p.p2);
        }
        spec.series = {s};
        spec.marker_x = taus[iff] * t_to_s;
        write_trace_plot(c, "trace.svg", spec);
    }
}

void preset_echo_vs_tau(RunContext& c) {
    check_run_keys(c.cfg.run, {"tau_points"});
    const int tp = knob_int(c.cfg.run, "tau_points", 140, 2, 200000);
    c.meta_run["tau_points"] = tp;
    const bool two_d = c.cfg.numerics.dimensionality == 2;

    if (!c.opt.full) {
        DeskModel d = make_desk(c.cfg);
        ThermalEnsemble ens;
        int nb;
        if (two_d) {
            ens = thermal_shell_ensemble(d.omega1, d.kT, c.cfg.trap.clip_ratio);
            nb = ens.smax + 1;
        } else {
            const int guess =
                static_cast<int>(std::ceil(c.cfg.trap.clip_ratio * d.kT / d.omega1)) + 2;
            ens = thermal_ensemble_1d(harmonic_levels(d.omega1, 0.0, guess), d.kT,
                                      c.cfg.trap.clip_ratio);
            nb = static_cast<int>(ens.n_states());
        }
        HarmonicAxisPair ay = desk_axis_pair(d, "y", nb, true);
        std::optional<HarmonicAxisPair> ax;
        if (two_d) ax = desk_axis_pair(d, "x", nb, false);

        std::vector<double> taus =
            with_inserted(linspace(0.02 / d.omega1, 2.2 * pi / d.omega1, tp),
                          {pi / d.omega2, 2.0 * pi / d.omega2});
        c.derived["scale"] = "reduced";
        c.derived["epsilon"] = d.eps;
        c.derived["epsilon_physical"] = d.eps_paper;
        c.derived["sag_over_width"] = d.dov;
        c.derived["n_states"] = ens.n_states();
        run_echo_axes(c, ens, two_d ? *ax : ay, two_d ? &ay : nullptr, std::move(taus),
                      d.omega2, d.t_to_s);
    } else {
        PaperModel m = make_paper(c.cfg);
        ThermalEnsemble ens;
        int nb;
        if (two_d) {
            ens = thermal_shell_ensemble(m.omega1, m.kT, c.cfg.trap.clip_ratio);
            nb = ens.smax + 1;
        } else {
            const int guess =
                static_cast<int>(std::ceil(c.cfg.trap.clip_ratio * m.kT / m.omega1)) + 2;
            ens = thermal_ensemble_1d(harmonic_levels(m.omega1, m.axis1(0).v0, guess), m.kT,
                                      c.cfg.trap.clip_ratio);
            nb = static_cast<int>(ens.n_states());
        }
        HarmonicAxisPair ax = make_axis_pair(m.axis1(0), m.axis2(0), nb);
        std::optional<HarmonicAxisPair> ay;
        if (two_d) ay = make_axis_pair(m.axis1(1), m.axis2(1), nb);

        const double omega2 = m.omega1 * std::sqrt(1.0 + m.eps);
        std::vector<double> taus =
            with_inserted(linspace(0.02 / m.omega1, 2.2 * pi / m.omega1, tp),
                          {pi / omega2, 2.0 * pi / omega2});
        c.derived["scale"] = "physical";
        c.derived["epsilon"] = m.eps;
        c.derived["n_states"] = ens.n_states();
        run_echo_axes(c, ens, ax, ay ? &*ay : nullptr, std::move(taus), omega2,
                      m.units.time_s);
    }
}

void preset_wavelength_compare(RunContext& c) {
    check_run_keys(c.cfg.run, {"lambdas_nm", "tau_points"});
    const std::vector<double> lambdas =
        knob_vec(c.cfg.run, "lambdas_nm", {805.0, 798.25, 796.25});
    const int tp = knob_int(c.cfg.run, "tau_points", 132, 2, 200000);
    if (c.cfg.trap.epsilon_override)
        throw ConfigError(
            "wavelength-compare scans run.lambdas_nm; remove trap.epsilon_override");
    c.meta_run["lambdas_nm"] = lambdas;
    c.meta_run["tau_points"] = tp;

    const bool two_d = c.cfg.numerics.dimensionality == 2;
    json per_lambda = json::array();
    PlotSpec spec;
    spec.title = "Echo response by trap wavelength";
    spec.xlabel = "tau (s)";
    spec.ylabel = "P2";

    double t_to_s = 0.0;
    for (double lnm : lambdas) {
        if (!(lnm > 795.0))
            throw ConfigError("run.lambdas_nm: " + std::to_string(lnm) +
                              " nm is not red of the D1 line (795 nm)");
        LoadedConfig cfg_l = with_lambda(c.cfg, lnm * 1e-9);
        PaperModel m = make_paper(cfg_l);
        t_to_s = m.units.time_s;

        ThermalEnsemble ens;
        int nb;
        if (two_d) {
            ens = thermal_shell_ensemble(m.omega1, m.kT, c.cfg.trap.clip_ratio);
            nb = ens.smax + 1;
        } else {
            const int guess =
                static_cast<int>(std::ceil(c.cfg.trap.clip_ratio * m.kT / m.omega1)) + 2;
            ens = thermal_ensemble_1d(harmonic_levels(m.omega1, m.axis1(0).v0, guess), m.kT,
                                      c.cfg.trap.clip_ratio);
            nb = static_cast<int>(ens.n_states());
        }
        HarmonicAxisPair ax = make_axis_pair(m.axis1(0), m.axis2(0), nb);
        std::optional<HarmonicAxisPair> ay;
        if (two_d) ay = make_axis_pair(m.axis1(1), m.axis2(1), nb);

        const double omega2 = m.omega1 * std::sqrt(1.0 + m.eps);
        std::vector<double> taus =
            with_inserted(linspace(0.02 / m.omega1, 1.3 * 2.0 * pi / m.omega1, tp),
                          {pi / omega2, 2.0 * pi / omega2});
        std::vector<TracePoint> tr =
            ensemble_echo_trace(ens, ax, ay ? &*ay : nullptr, taus, c.threads);

        // plateau window between the decay shoulder and the revival
        const double tosc = 2.0 * pi / m.omega1;
        double plateau_sum = 0.0, plateau_min = 1.0, plateau_max = 0.0;
        int plateau_n = 0;
        double pmax = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            pmax = std::max(pmax, tr[i].p2);
            if (taus[i] >= 0.15 * tosc && taus[i] <= 0.40 * tosc) {
                plateau_sum += tr[i].p2;
                plateau_min = std::min(plateau_min, tr[i].p2);
                plateau_max = std::max(plateau_max, tr[i].p2);
                ++plateau_n;
            }
        }
        char namebuf[64];
        std::snprintf(namebuf, sizeof namebuf, "trace_%gnm.csv", lnm);
        char lblbuf[32];
        std::snprintf(lblbuf, sizeof lblbuf, "%g nm", lnm);
        write_csv(c.track(namebuf),
                  trace_table(tr, t_to_s, "ensemble",
                              {std::string("spin-echo trace at ") + lblbuf,
                               "tau_s: delay per arm, seconds"}));

        json jl;
        jl["lambda_nm"] = lnm;
        jl["epsilon"] = m.eps;
        jl["plateau_mean_p2"] = plateau_n ? plateau_sum / plateau_n : 0.0;
        jl["plateau_ptp_p2"] = plateau_n ? plateau_max - plateau_min : 0.0;
        jl["p2_full_revival"] = tr[nearest_index(taus, 2.0 * pi / omega2)].p2;
        jl["max_p2"] = pmax;
        jl["band_x"] = band_json(ax);
        if (ay) jl["band_y"] = band_json(*ay);
        per_lambda.push_back(jl);

        if (c.opt.plot) {
            PlotSeries s{lblbuf, {}, {}};
            for (std::size_t i = 0; i < taus.size(); ++i) {
                s.x.push_back(taus[i] * t_to_s);
                s.y.push_back(tr[i].p2);
            }
            spec.series.push_back(std::move(s));
        }
    }
    c.derived["traces"] = per_lambda;
    if (c.opt.plot) write_trace_plot(c, "trace.svg", spec);
}

void preset_stability_curve(RunContext& c) {
    check_run_keys(c.cfg.run, {"epsilons"});
    std::vector<double> eps_default = {0.0,    1e-4, 2e-4, 3.2e-4,
                                       0.0,    1e-3, 0.0,  3e-3,
                                       0.0,    8e-3};
    eps_default[4] = epsilon_from_wavelength(805e-9, c.cfg.constants);
    eps_default[6] = epsilon_from_wavelength(798.25e-9, c.cfg.constants);
    eps_default[8] = epsilon_from_wavelength(796.25e-9, c.cfg.constants);
    std::sort(eps_default.begin(), eps_default.end());
    const std::vector<double> epsilons = knob_vec(c.cfg.run, "epsilons", eps_default);
    c.meta_run["epsilons"] = epsilons;

    const bool two_d = c.cfg.numerics.dimensionality == 2;
    const bool full = c.opt.full;

    ThermalEnsemble ens;
    int nb;
    double omega1;
    if (full) {
        PaperModel m0 = make_paper(with_eps(c.cfg, 0.0));
        omega1 = m0.omega1;
        if (two_d) {
            ens = thermal_shell_ensemble(m0.omega1, m0.kT, c.cfg.trap.clip_ratio);
            nb = ens.smax + 1;
        } else {
            const int guess =
                static_cast<int>(std::ceil(c.cfg.trap.clip_ratio * m0.kT / m0.omega1)) + 2;
            ens = thermal_ensemble_1d(harmonic_levels(m0.omega1, m0.axis1(0).v0, guess),
                                      m0.kT, c.cfg.trap.clip_ratio);
            nb = static_cast<int>(ens.n_states());
        }
    } else {
        DeskModel d0 = make_desk(with_eps(c.cfg, 0.0));
        omega1 = d0.omega1;
        if (two_d) {
            ens = thermal_shell_ensemble(d0.omega1, d0.kT, c.cfg.trap.clip_ratio);
            nb = ens.smax + 1;
        } else {
            const int guess =
                static_cast<int>(std::ceil(c.cfg.trap.clip_ratio * d0.kT / d0.omega1)) + 2;
            ens = thermal_ensemble_1d(harmonic_levels(d0.omega1, 0.0, guess), d0.kT,
                                      c.cfg.trap.clip_ratio);
            nb = static_cast<int>(ens.n_states());
        }
    }

    json eps_desk = json::array();
    // pairs of diagnostic diagonals per epsilon: sag displacement only /
    // frequency mismatch only
    std::vector<double> p2_sag, p2_freq;

    auto builder_full = [&](double eps_p) {
        PaperModel m = make_paper(with_eps(c.cfg, eps_p));
        AxisDiagonals d;
        d.onn_x = band_diag(make_axis_pair(m.axis1(0), m.axis2(0), nb), nb);
        if (two_d) d.onn_y = band_diag(make_axis_pair(m.axis1(1), m.axis2(1), nb), nb);
        return d;
    };
    auto builder_desk = [&](double eps_p) {
        DeskModel d = make_desk(with_eps(c.cfg, eps_p == 0.0 ? 0.0 : eps_p));
        AxisDiagonals out;
        const bool vertical_first = !two_d;
        out.onn_x = band_diag(desk_axis_pair(d, vertical_first ? "y" : "x", nb, vertical_first),
                              nb);
        if (two_d) out.onn_y = band_diag(desk_axis_pair(d, "y", nb, true), nb);
        return out;
    };

    std::vector<StabilityPoint> pts = stability_curve(
        epsilons, full ? std::function<AxisDiagonals(double)>(builder_full) : builder_desk,
        ens);

    // decomposition diagnostics: same displacement with equal frequencies,
    // and frequency mismatch with zero displacement
    for (double eps_p : epsilons) {
        double w1, w2, dd, mass;
        if (full) {
            PaperModel m = make_paper(with_eps(c.cfg, eps_p));
            std::size_t yi = m.naxes() - 1;
            w1 = m.axis1(yi).omega;
            w2 = m.axis2(yi).omega;
            dd = m.axis2(yi).center - m.axis1(yi).center;
            mass = m.harm.mass;
        } else {
            DeskModel d = make_desk(with_eps(c.cfg, eps_p));
            w1 = d.omega1;
            w2 = d.omega2;
            dd = d.dov * d.a1;
            mass = desk_mass;
            eps_desk.push_back(d.eps);
        }
        auto avg_of = [&](double wa, double wb, double disp) {
            AxisPotential h1 = analytic_axis("y", mass, wa, 0.0);
            AxisPotential h2 = analytic_axis("y", mass, wb, disp);
            std::vector<double> onn = band_diag(make_axis_pair(h1, h2, nb), nb);
            AxisDiagonals diags;
            diags.onn_x = onn;
            if (two_d) diags.onn_y = onn; // x carries no sag; reuse for the bound
            std::vector<StabilityPoint> one =
                stability_curve({eps_p}, [&](double) { return diags; }, ens);
            return one[0].p2_longtime;
        };
        p2_sag.push_back(avg_of(w1, w1, dd));
        p2_freq.push_back(avg_of(w1, w2, 0.0));
    }

    CsvTable t;
    t.comments = {"long-time echo floor vs branch mismatch",
                  "epsilon is the physical-scale branch depth mismatch",
                  "P2_longtime = (1 - avg_Onn4)/2"};
    t.columns = {"epsilon", "avg_Onn4", "P2_longtime", "stderr"};
    for (const auto& p : pts)
        t.rows.push_back({csv_num(p.epsilon), csv_num(p.avg_onn4), csv_num(p.p2_longtime),
                          csv_num(p.stderr_est)});
    write_csv(c.track("curve.csv"), t);

    c.derived["scale"] = full ? "physical" : "reduced";
    c.derived["omega1_internal"] = omega1;
    c.derived["n_states"] = ens.n_states();
    if (!full) c.derived["epsilon_reduced"] = eps_desk;
    c.derived["p2_sag_only"] = p2_sag;
    c.derived["p2_freq_only"] = p2_freq;

    if (c.opt.plot) {
        PlotSpec spec;
        spec.title = "Long-time echo floor vs epsilon";
        spec.xlabel = "epsilon";
        spec.ylabel = "P2 long-time";
        spec.logx = true;
        PlotSeries s{"P2", {}, {}}, ss{"sag only", {}, {}}, sf{"freq only", {}, {}};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            s.x.push_back(pts[i].epsilon);
            s.y.push_back(pts[i].p2_longtime);
            ss.x.push_back(pts[i].epsilon);
            ss.y.push_back(p2_sag[i]);
            sf.x.push_back(pts[i].epsilon);
            sf.y.push_back(p2_freq[i]);
        }
        spec.series = {s, ss, sf};
        write_trace_plot(c, "curve.svg", spec);
    }
}

void preset_mw_spectrum(RunContext& c) {
    check_run_keys(c.cfg.run, {"detuning_points", "detuning_halfwidth", "pulse_duration_s",
                               "pulse_areas_pi", "max_states"});
    const int np = knob_int(c.cfg.run, "detuning_points", 261, 5, 20001);
    const double hw = knob_num(c.cfg.run, "detuning_halfwidth", 2.6);
    if (!(hw > 0)) throw ConfigError("run.detuning_halfwidth must be > 0");
    const double tps = knob_num(c.cfg.run, "pulse_duration_s", 0.02);
    if (!(tps > 0)) throw ConfigError("run.pulse_duration_s must be > 0");
    const std::vector<double> areas = knob_vec(c.cfg.run, "pulse_areas_pi", {1.0, 4.0});
    for (double a : areas)
        if (!(a > 0)) throw ConfigError("run.pulse_areas_pi must contain positive areas");
    const std::optional<double> max_states_knob = knob_opt(c.cfg.run, "max_states");
    std::optional<std::size_t> max_states;
    if (max_states_knob) {
        if (*max_states_knob < 1) throw ConfigError("run.max_states must be >= 1");
        max_states = static_cast<std::size_t>(*max_states_knob);
    }
    c.meta_run["detuning_points"] = np;
    c.meta_run["detuning_halfwidth"] = hw;
    c.meta_run["pulse_duration_s"] = tps;
    c.meta_run["pulse_areas_pi"] = areas;

    // vertical axis, reduced scale
    DeskModel d = make_desk(c.cfg);
    const int guess = static_cast<int>(std::ceil(c.cfg.trap.clip_ratio * d.kT / d.omega1)) + 2;
    std::vector<double> e1_all = harmonic_levels(d.omega1, 0.0, guess);
    ThermalEnsemble ens = thermal_ensemble_1d(e1_all, d.kT, c.cfg.trap.clip_ratio);
    const int nb = static_cast<int>(ens.n_states());
    const int nt = nb + 30; // headroom above the thermal cut for the pulse window

    const double dcenter = d.dov * d.a1;
    OverlapMatrix ov;
    ov.entries = harmonic_overlap_recursion(nt, nb, desk_mass * d.omega1,
                                            desk_mass * d.omega2, dcenter);
    std::vector<double> e1(e1_all.begin(), e1_all.begin() + nb);
    std::vector<double> e2 = harmonic_levels(d.omega2, 0.0, nt);

    std::vector<double> nu(static_cast<std::size_t>(nb));
    for (int n = 0; n < nb; ++n)
        nu[static_cast<std::size_t>(n)] = e2[static_cast<std::size_t>(n)] -
                                          e1[static_cast<std::size_t>(n)];
    DephasingEstimate est = dephasing_estimate(ens, nu, {});
    const double car_mean = est.mean_shift;

    std::vector<double> dets(static_cast<std::size_t>(np));
    for (int i = 0; i < np; ++i)
        dets[static_cast<std::size_t>(i)] =
            car_mean + (np == 1 ? 0.0 : (2.0 * hw * i / (np - 1) - hw)) * d.omega1;

    const double t_pulse = d.omega1_si * tps / d.omega1; // internal duration
    const double hz_per_internal = (d.omega1_si / d.omega1) / (2.0 * pi);

    const std::vector<double> offsets = {-2.0 * d.omega2, -d.omega2, d.omega2, 2.0 * d.omega2};

    json per_area = json::array();
    PlotSpec spec;
    spec.title = "Microwave spectrum";
    spec.xlabel = "detuning (Hz)";
    spec.ylabel = "P2 after pulse";

    for (double area : areas) {
        RabiProblem prob;
        prob.rabi_omega = area * pi / t_pulse;
        prob.pulse_duration = t_pulse;
        prob.overlap = &ov;
        prob.e1 = &e1;
        prob.e2 = &e2;
        std::vector<SpectrumPoint> sp =
            scan_spectrum(prob, ens, dets, c.threads, max_states, c.opt.seed);

        SpectrumAnalysis an = analyze_spectrum(sp, car_mean, 0.45 * d.omega1, offsets);

        char fname[48];
        if (std::fabs(area - 1.0) < 1e-12)
            std::snprintf(fname, sizeof fname, "spectrum.csv");
        else
            std::snprintf(fname, sizeof fname, "spectrum_%gpi.csv", area);

        CsvTable t;
        char head[96];
        std::snprintf(head, sizeof head, "microwave spectrum, pulse area %g pi", area);
        t.comments = {head, "detuning_hz: drive offset from the bare hyperfine splitting"};
        t.columns = {"detuning_hz", "P2", "stderr"};
        for (const auto& p : sp)
            t.rows.push_back({csv_num(p.detuning * hz_per_internal), csv_num(p.p2),
                              csv_num(p.stderr_est)});
        write_csv(c.track(fname), t);

        json ja;
        ja["area_pi"] = area;
        ja["rabi_omega_internal"] = prob.rabi_omega;
        ja["carrier_detuning_hz"] = an.carrier_detuning * hz_per_internal;
        ja["carrier_p2"] = an.carrier_p2;
        json sb = json::array();
        for (const auto& s : an.sidebands) {
            json jb;
            jb["offset_hz"] = s.offset * hz_per_internal;
            jb["peak_detuning_hz"] = s.peak_detuning * hz_per_internal;
            jb["p2"] = s.p2;
            jb["ratio_to_carrier"] = s.ratio;
            sb.push_back(jb);
        }
        ja["sidebands"] = sb;
        per_area.push_back(ja);

        if (c.opt.plot) {
            char lbl[24];
            std::snprintf(lbl, sizeof lbl, "%g pi", area);
            PlotSeries s{lbl, {}, {}};
            for (const auto& p : sp) {
                s.x.push_back(p.detuning * hz_per_internal);
                s.y.push_back(p.p2);
            }
            spec.series.push_back(std::move(s));
            if (!spec.marker_x) spec.marker_x = an.carrier_detuning * hz_per_internal;
        }
    }

    c.derived["scale"] = "reduced";
    c.derived["epsilon"] = d.eps;
    c.derived["epsilon_physical"] = d.eps_paper;
    c.derived["sag_over_width"] = d.dov;
    c.derived["n_states"] = ens.n_states();
    c.derived["carrier_mean_hz"] = car_mean * hz_per_internal;
    c.derived["pulse_duration_internal"] = t_pulse;
    c.derived["areas"] = per_area;

    if (c.opt.plot) write_trace_plot(c, "spectrum.svg", spec);
}

void preset_eigensolve_report(RunContext& c) {
    check_run_keys(c.cfg.run, {"include_doubling"});
    const bool dbl = knob_bool(c.cfg.run, "include_doubling", true);
    c.meta_run["include_doubling"] = dbl;

    DeskModel d = make_desk(c.cfg);
    LoadedConfig cfg_g = with_eps(c.cfg, d.eps); // reduced-scale branch mismatch
    cfg_g.numerics.dimensionality = 1;
    PotentialPair pair = build_pair(cfg_g.trap, cfg_g.numerics, cfg_g.constants, desk_mass);

    SpectralBasis b1 = diagonalize(pair.v1[0]);
    SpectralBasis b2 = diagonalize(pair.v2[0]);
    OverlapMatrix ov = overlap_matrix(b1, b2);

    const double omega_fit = 2.0 / std::sqrt(desk_mass);
    const double e0_plus_depth = b1.energies[0] + 1.0;
    const double spacing01 = b1.energies[1] - b1.energies[0];

    // orthonormality of the kept branch-1 states under grid quadrature
    double ortho_max = 0.0;
    {
        Eigen::MatrixXd g =
            b1.wavefunctions.transpose() * b1.wavefunctions * b1.grid.dx;
        for (int i = 0; i < g.rows(); ++i)
            for (int j = 0; j < g.cols(); ++j)
                ortho_max = std::max(ortho_max,
                                     std::fabs(g(i, j) - (i == j ? 1.0 : 0.0)));
    }

    // completeness of branch-2 expansion over thermally relevant columns
    const double clip_e = c.cfg.trap.clip_ratio * d.kT;
    int n_thermal = 0;
    while (n_thermal < b1.n_states() &&
           b1.energies[n_thermal] - b1.energies[0] < clip_e)
        ++n_thermal;
    auto [worst_gap_val, worst_gap_col] = ov.worst_column(n_thermal);

    double doubling_shift = 0.0;
    if (dbl) {
        LoadedConfig cfg_h = cfg_g;
        cfg_h.numerics.grid_points_per_axis = cfg_g.numerics.grid_points_per_axis / 2;
        PotentialPair pair_h =
            build_pair(cfg_h.trap, cfg_h.numerics, cfg_h.constants, desk_mass);
        SpectralBasis b1h = diagonalize(pair_h.v1[0]);
        doubling_shift = std::fabs(b1h.energies[0] - b1.energies[0]);
    }

    CsvTable t;
    t.comments = {"bound-state solver diagnostics, reduced-scale gaussian trap",
                  "energies in trap-depth units"};
    t.columns = {"metric", "value"};
    auto row = [&](const char* k, double v) {
        t.rows.push_back({k, csv_num(v)});
    };
    row("grid_points", c.cfg.numerics.grid_points_per_axis);
    row("domain_halfwidth", pair.v1[0].grid.halfwidth());
    row("mass_internal", desk_mass);
    row("epsilon", d.eps);
    row("bound_states_branch1", b1.n_states());
    row("bound_states_branch2", b2.n_states());
    row("dropped_by_tail_branch1", b1.dropped_by_tail);
    row("dropped_by_tail_branch2", b2.dropped_by_tail);
    row("ground_energy_plus_depth", e0_plus_depth);
    row("harmonic_half_omega", omega_fit / 2.0);
    row("spacing_0_1", spacing01);
    row("spacing_over_harmonic", spacing01 / omega_fit);
    row("max_orthonormality_error", ortho_max);
    row("thermal_columns_checked", n_thermal);
    row("worst_completeness_gap", worst_gap_val);
    row("worst_completeness_column", worst_gap_col);
    if (dbl) row("ground_shift_at_half_grid", doubling_shift);
    write_csv(c.track("report.csv"), t);

    c.derived["scale"] = "reduced";
    c.derived["epsilon"] = d.eps;
    c.derived["bound_states_branch1"] = b1.n_states();
    c.derived["bound_states_branch2"] = b2.n_states();
    c.derived["worst_completeness_gap"] = worst_gap_val;

    if (c.opt.plot) {
        PlotSpec spec;
        spec.title = "Trap potentials, reduced scale";
        spec.xlabel = "position (waist units)";
        spec.ylabel = "V (trap depth units)";
        PlotSeries s1{"branch 1", {}, {}}, s2{"branch 2", {}, {}};
        for (int i = 0; i < pair.v1[0].grid.n; ++i) {
            s1.x.push_back(pair.v1[0].grid.x(i));
            s1.y.push_back(pair.v1[0].values[i]);
            s2.x.push_back(pair.v2[0].grid.x(i));
            s2.y.push_back(pair.v2[0].values[i]);
        }
        spec.series = {s1, s2};
        write_trace_plot(c, "report.svg", spec);
    }
}

json preset_default_config(const std::string& preset) {
    json j = json::object();
    if (preset == "ramsey-decay") {
        j["trap"]["wavelength_lambda"] = 800e-9;
        j["trap"]["epsilon_model"] = "d_centroid";
    } else if (preset == "echo-vs-tau") {
        j["trap"]["epsilon_override"] = 0.01 / desk_eps_scale;
    } else if (preset == "wavelength-compare") {
        // per-wavelength scan; trap epsilon comes from run.lambdas_nm
    } else if (preset == "stability-curve") {
        j["trap"]["epsilon_override"] = 0.0; // per-point override
    } else if (preset == "mw-spectrum") {
        j["trap"]["wavelength_lambda"] = 805e-9;
        j["numerics"]["dimensionality"] = 1;
    } else if (preset == "eigensolve-report") {
        j["trap"]["epsilon_override"] = 0.01 / desk_eps_scale;
        j["trap"]["gravity_enabled"] = false;
        j["numerics"]["dimensionality"] = 1;
    }
    return j;
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "ramsey-decay",  "echo-vs-tau", "wavelength-compare",
        "stability-curve", "mw-spectrum", "eigensolve-report",
    };
    return names;
}

std::vector<std::string> run_preset(const RunOptions& opt) {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), opt.preset) == names.end())
        throw ConfigError("unknown preset '" + opt.preset + "'");

    RunContext c;
    c.opt = opt;
    c.cfg = opt.config_path.empty() ? config_from_json(preset_default_config(opt.preset))
                                    : load_config(opt.config_path);
    c.threads = opt.threads > 0 ? static_cast<unsigned>(opt.threads)
                : c.cfg.numerics.scan_parallelism > 0
                    ? static_cast<unsigned>(c.cfg.numerics.scan_parallelism)
                    : 1u;
    c.out = fs::path(opt.out_dir);
    {
        std::error_code ec;
        fs::create_directories(c.out, ec);
        if (ec) throw ConfigError("cannot create output directory " + opt.out_dir + ": " +
                                  ec.message());
    }

    try {
        if (opt.preset == "ramsey-decay")
            preset_ramsey_decay(c);
        else if (opt.preset == "echo-vs-tau")
            preset_echo_vs_tau(c);
        else if (opt.preset == "wavelength-compare")
            preset_wavelength_compare(c);
        else if (opt.preset == "stability-curve")
            preset_stability_curve(c);
        else if (opt.preset == "mw-spectrum")
            preset_mw_spectrum(c);
        else
            preset_eigensolve_report(c);

        json meta;
        meta["preset"] = opt.preset;
        meta["code_version"] = code_version;
        meta["full"] = opt.full;
        meta["seed"] = opt.seed;
        meta["threads"] = c.threads;
        meta["simd_backend"] = kernels::active_name();
        meta["config"] = config_to_json(c.cfg);
        meta["run"] = c.meta_run;
        meta["derived"] = c.derived;
        json arts = json::array();
        for (const auto& a : c.artifacts) arts.push_back(a.name);
        arts.push_back("meta.json");
        meta["artifacts"] = arts;
        write_json_file(c.track("meta.json"), meta);
    } catch (...) {
        c.purge();
        throw;
    }

    std::vector<std::string> out;
    for (const auto& a : c.artifacts) out.push_back(a.name);
    return out;
}

} // namespace echospec
