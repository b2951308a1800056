#include "echospec/dynamics.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "echospec/errors.hpp"
#include "echospec/kernels.hpp"

namespace echospec {

namespace {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;

Eigen::Map<const VecC> as_eigen(const std::vector<cplx>& v) {
    return Eigen::Map<const VecC>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double JointState::norm2() const {
    double acc = 0.0;
    for (const cplx& z : amp1) acc += std::norm(z);
    for (const cplx& z : amp2) acc += std::norm(z);
    return acc;
}

JointState JointState::ground(std::size_t n1, std::size_t n2) {
    return in_branch1(n1, n2, 0);
}

JointState JointState::in_branch1(std::size_t n1, std::size_t n2, std::size_t n) {
    JointState st;
    st.amp1.assign(n1, cplx(0.0, 0.0));
    st.amp2.assign(n2, cplx(0.0, 0.0));
    st.amp1.at(n) = cplx(1.0, 0.0);
    return st;
}

PulseSequence PulseSequence::ramsey(double tau, double phase2) {
    PulseSequence s;
    s.steps.push_back({SequenceStep::Kind::pulse, {0.5 * pi, 0.0}, {}});
    s.steps.push_back({SequenceStep::Kind::delay, {}, {tau}});
    s.steps.push_back({SequenceStep::Kind::pulse, {0.5 * pi, phase2}, {}});
    return s;
}

PulseSequence PulseSequence::echo(double tau) {
    PulseSequence s;
    s.steps.push_back({SequenceStep::Kind::pulse, {0.5 * pi, 0.0}, {}});
    s.steps.push_back({SequenceStep::Kind::delay, {}, {tau}});
    s.steps.push_back({SequenceStep::Kind::pulse, {pi, 0.0}, {}});
    s.steps.push_back({SequenceStep::Kind::delay, {}, {tau}});
    s.steps.push_back({SequenceStep::Kind::pulse, {0.5 * pi, 0.0}, {}});
    return s;
}

PulseSequence PulseSequence::probe(double theta) {
    PulseSequence s;
    s.steps.push_back({SequenceStep::Kind::pulse, {theta, 0.0}, {}});
    return s;
}

void apply_sudden_pulse(JointState& state, const OverlapMatrix& overlap,
                        const PulseOp& pulse) {
    const Eigen::MatrixXd& O = overlap.entries;
    if (static_cast<Eigen::Index>(state.amp1.size()) != O.cols() ||
        static_cast<Eigen::Index>(state.amp2.size()) != O.rows()) {
        throw NumericsError("pulse applied to a state whose basis sizes do not match the overlap matrix");
    }
    const double c = std::cos(0.5 * pulse.theta);
    const double s = std::sin(0.5 * pulse.theta);
    const cplx to2 = cplx(0.0, -1.0) * std::polar(1.0, +pulse.phase) * s;
    const cplx to1 = cplx(0.0, -1.0) * std::polar(1.0, -pulse.phase) * s;

    const double before = state.norm2();
    auto a1 = as_eigen(state.amp1);
    auto a2 = as_eigen(state.amp2);
    VecC n1 = c * a1 + to1 * (O.transpose() * a2);
    VecC n2 = c * a2 + to2 * (O * a1);
    for (Eigen::Index i = 0; i < n1.size(); ++i) state.amp1[static_cast<std::size_t>(i)] = n1[i];
    for (Eigen::Index i = 0; i < n2.size(); ++i) state.amp2[static_cast<std::size_t>(i)] = n2[i];
    // Truncated O is a contraction, so population can only leak out here.
    const double lost = before - state.norm2();
    state.deficit += lost;
    if (lost > 1e-3) state.basis_warning = true;
}

void free_evolve(JointState& state, const std::vector<double>& e1,
                 const std::vector<double>& e2, double tau, double delta_mw) {
    if (state.amp1.size() > e1.size() || state.amp2.size() > e2.size()) {
        throw NumericsError("free evolution called with fewer energies than amplitudes");
    }
    for (std::size_t n = 0; n < state.amp1.size(); ++n) {
        state.amp1[n] *= std::polar(1.0, -e1[n] * tau);
    }
    for (std::size_t k = 0; k < state.amp2.size(); ++k) {
        state.amp2[k] *= std::polar(1.0, -(e2[k] - delta_mw) * tau);
    }
}

SequenceResult run_sequence(const JointState& initial, const OverlapMatrix& overlap,
                            const std::vector<double>& e1, const std::vector<double>& e2,
                            const PulseSequence& seq, double delta_mw) {
    JointState st = initial;
    for (const SequenceStep& step : seq.steps) {
        if (step.kind == SequenceStep::Kind::pulse) {
            apply_sudden_pulse(st, overlap, step.pulse);
            if (st.deficit > 1e-6) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "cumulative norm drift %.3e after pulse; basis truncation is significant, raise basis_cutoff_energy or the state count",
                              st.deficit);
                throw NumericsError(buf);
            }
        } else {
            free_evolve(st, e1, e2, step.delay.tau, delta_mw);
        }
    }
    SequenceResult out;
    out.p2 = 0.0;
    for (const cplx& z : st.amp2) out.p2 += std::norm(z);
    out.state = std::move(st);
    return out;
}

cplx ramsey_amplitude(const OverlapMatrix& overlap, const std::vector<double>& e1,
                      const std::vector<double>& e2, std::size_t n, double tau) {
    const Eigen::MatrixXd& O = overlap.entries;
    cplx acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < O.rows(); ++k) {
        const double w = O(k, static_cast<Eigen::Index>(n));
        acc += (w * w) * std::polar(1.0, -e2[static_cast<std::size_t>(k)] * tau);
    }
    return std::polar(1.0, e1[n] * tau) * acc;
}

double ramsey_shift_limit(const OverlapMatrix& overlap, const std::vector<double>& e1,
                          const std::vector<double>& e2, std::size_t n) {
    const Eigen::MatrixXd& O = overlap.entries;
    double wsum = 0.0, esum = 0.0;
    for (Eigen::Index k = 0; k < O.rows(); ++k) {
        const double w = O(k, static_cast<Eigen::Index>(n)) * O(k, static_cast<Eigen::Index>(n));
        wsum += w;
        esum += w * e2[static_cast<std::size_t>(k)];
    }
    if (wsum <= 0.0) throw NumericsError("empty overlap column in shift computation");
    return esum / wsum - e1[n];
}

RamseyPoint ramsey_contrast(const OverlapMatrix& overlap, const std::vector<double>& e1,
                            const std::vector<double>& e2, std::size_t n, double tau) {
    RamseyPoint out;
    if (tau == 0.0) {
        out.contrast = 1.0;
        out.delta_n = ramsey_shift_limit(overlap, e1, e2, n);
        return out;
    }
    const cplx a = ramsey_amplitude(overlap, e1, e2, n, tau);
    out.contrast = std::abs(a);
    out.delta_n = -std::arg(a) / tau;
    return out;
}

cplx echo_amplitude(const OverlapMatrix& overlap, const std::vector<double>& e1,
                    const std::vector<double>& e2, std::size_t n, double tau) {
    const Eigen::MatrixXd& O = overlap.entries;
    VecC v(O.rows());
    for (Eigen::Index k = 0; k < O.rows(); ++k) {
        v[k] = std::polar(1.0, -e2[static_cast<std::size_t>(k)] * tau) *
               O(k, static_cast<Eigen::Index>(n));
    }
    VecC g = O.transpose() * v;  // g[l] = G_{l n}
    std::vector<cplx> u(static_cast<std::size_t>(g.size()));
    for (std::size_t l = 0; l < u.size(); ++l) u[l] = std::polar(1.0, -e1[l] * tau);
    const cplx acc = kernels::abs2_phase_sum(g.data(), u.data(), u.size());
    return std::polar(1.0, e1[n] * tau) * acc;
}

cplx echo_amplitude_dense(const OverlapMatrix& overlap, const std::vector<double>& e1,
                          const std::vector<double>& e2, std::size_t n, double tau) {
    const Eigen::MatrixXd& O = overlap.entries;
    const Eigen::Index nb = O.cols(), nt = O.rows();
    VecC u2(nt), d1(nb);
    for (Eigen::Index k = 0; k < nt; ++k) u2[k] = std::polar(1.0, -e2[static_cast<std::size_t>(k)] * tau);
    for (Eigen::Index l = 0; l < nb; ++l) d1[l] = std::polar(1.0, -e1[static_cast<std::size_t>(l)] * tau);
    Eigen::MatrixXcd Oc = O.cast<cplx>();
    Eigen::MatrixXcd U = Oc.transpose() * u2.asDiagonal() * Oc;
    VecC d1c = d1.conjugate();
    Eigen::MatrixXcd M = d1c.asDiagonal() * (U.conjugate() * (d1.asDiagonal() * U));
    return M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

double echo_longtime_average(const OverlapMatrix& overlap, std::size_t n) {
    const Eigen::MatrixXd& O = overlap.entries;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < O.rows(); ++k) {
        const double w = O(k, static_cast<Eigen::Index>(n));
        acc += w * w * w * w;
    }
    return acc;
}

double long_time_echo(const OverlapMatrix& overlap, std::size_t n) {
    const double onn = overlap.entries(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    return 0.5 * (1.0 - onn * onn * onn * onn);
}

double p2_from_echo_amplitude(cplx a) {
    double p2 = 0.5 * (1.0 - a.real());
    if (p2 < 0.0) {
        if (p2 < -1e-9) throw NumericsError("echo probability below zero beyond rounding tolerance");
        p2 = 0.0;
    }
    if (p2 > 1.0) {
        if (p2 > 1.0 + 1e-9) throw NumericsError("echo probability above one beyond rounding tolerance");
        p2 = 1.0;
    }
    return p2;
}

}  // namespace echospec
