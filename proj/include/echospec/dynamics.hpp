#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "echospec/spectral.hpp"

namespace echospec {

// Joint internal+motional state over one trap axis. amp1[n] multiplies
// |1>|n_1>, amp2[k] multiplies |2>|k_2>; each branch is expanded in its own
// motional basis, so a pulse transfer has to route through the overlap
// matrix.
struct JointState {
    std::vector<std::complex<double>> amp1;
    std::vector<std::complex<double>> amp2;
    // Population lost to basis truncation, accumulated over pulses. Kept
    // separate instead of renormalizing so norm drift stays observable.
    double deficit = 0.0;
    // Set when a single pulse loses more than 1e-3 of the active norm;
    // surfaced in trace metadata as a basis-too-small warning.
    bool basis_warning = false;

    double norm2() const;
    static JointState ground(std::size_t n1, std::size_t n2);
    static JointState in_branch1(std::size_t n1, std::size_t n2, std::size_t n);
};

struct PulseOp {
    double theta = 0.0;  // pulse area
    double phase = 0.0;  // drive phase phi
};

struct DelayOp {
    double tau = 0.0;  // internal time units
};

struct SequenceStep {
    enum class Kind { pulse, delay } kind = Kind::pulse;
    PulseOp pulse;
    DelayOp delay;
};

struct PulseSequence {
    std::vector<SequenceStep> steps;
    static PulseSequence ramsey(double tau, double phase2 = 0.0);
    static PulseSequence echo(double tau);
    static PulseSequence probe(double theta);
};

// Instantaneous microwave pulse in the sudden approximation:
//   amp1' = cos(t/2) amp1 - i e^{-i phi} sin(t/2) O^T amp2
//   amp2' = cos(t/2) amp2 - i e^{+i phi} sin(t/2) O   amp1
// with O(k,n) = <k_2|n_1>. Unitary up to basis truncation; the lost
// population is added to state.deficit.
void apply_sudden_pulse(JointState& state, const OverlapMatrix& overlap,
                        const PulseOp& pulse);

// Free flight in the rotating frame of the drive: amp1[n] picks up
// e^{-i E1_n tau}, amp2[k] picks up e^{-i (E2_k - delta_mw) tau}. delta_mw
// is the microwave detuning from the bare hyperfine splitting; the huge
// hyperfine offset itself is absorbed into the frame and never appears.
void free_evolve(JointState& state, const std::vector<double>& e1,
                 const std::vector<double>& e2, double tau, double delta_mw = 0.0);

struct SequenceResult {
    JointState state;
    double p2 = 0.0;  // branch-2 population after the sequence
};

// Runs steps in order. Aborts with NumericsError once the cumulative
// truncation deficit exceeds 1e-6: a basis that loses real population must
// be enlarged, not papered over.
SequenceResult run_sequence(const JointState& initial,
                            const OverlapMatrix& overlap,
                            const std::vector<double>& e1,
                            const std::vector<double>& e2,
                            const PulseSequence& seq, double delta_mw = 0.0);

// --- closed-form per-state signals -------------------------------------

// Ramsey amplitude for a single initial motional state n:
//   A_n(tau) = e^{+i E1_n tau} sum_k |O_kn|^2 e^{-i E2_k tau}
// P2 = (1 + Re[A_n e^{+i delta tau}])/2 where delta is the microwave
// detuning from the bare hyperfine splitting. |A_n| is the single-state
// contrast; arg gives the trap-induced shift.
std::complex<double> ramsey_amplitude(const OverlapMatrix& overlap,
                                      const std::vector<double>& e1,
                                      const std::vector<double>& e2,
                                      std::size_t n, double tau);

// tau -> 0 limit of -arg(A_n)/tau: the |O|^2-weighted mean of
// E2_k - E1_n over the column.
double ramsey_shift_limit(const OverlapMatrix& overlap,
                          const std::vector<double>& e1,
                          const std::vector<double>& e2, std::size_t n);

struct RamseyPoint {
    double contrast = 0.0;  // |A_n(tau)|
    double delta_n = 0.0;   // -arg(A_n)/tau; tau = 0 uses the limit above
};

// Fringe contrast and generalized detuning for initial state n. delta_n is
// fixed by requiring <n|e^{-i(H2 - w_MW + Delta_n) tau}|n> real positive,
// which lands on -arg(A_n)/tau (defined mod 2 pi / tau at large tau).
RamseyPoint ramsey_contrast(const OverlapMatrix& overlap,
                            const std::vector<double>& e1,
                            const std::vector<double>& e2, std::size_t n,
                            double tau);

// Echo amplitude for initial state n with both delays equal to tau:
//   A_n(tau) = e^{+i E1_n tau} sum_l |G_ln|^2 e^{-i E1_l tau},
//   G = O^T diag(e^{-i E2 tau}) O.
// P2 = (1 - Re A_n)/2; the pi pulse phase and microwave detuning cancel.
std::complex<double> echo_amplitude(const OverlapMatrix& overlap,
                                    const std::vector<double>& e1,
                                    const std::vector<double>& e2,
                                    std::size_t n, double tau);

// Same quantity through dense matrix products (the cross-check route):
// M = diag(e^{+i E1 tau}) U^dagger diag(e^{-i E1 tau}) U with
// U = O^T diag(e^{-i E2 tau}) O; A_n = M_nn.
std::complex<double> echo_amplitude_dense(const OverlapMatrix& overlap,
                                          const std::vector<double>& e1,
                                          const std::vector<double>& e2,
                                          std::size_t n, double tau);

// Exact stationary (infinite-time) average of the single-axis echo
// amplitude for incommensurate spectra: <A_n> = sum_k |O_kn|^4. The
// matching P2 average is (1 - <A_n>)/2. The simpler |O_nn|^4 prediction
// used for stability curves keeps only the k = n term.
double echo_longtime_average(const OverlapMatrix& overlap, std::size_t n);

// Random-phase plateau prediction for the echo: P2 = (1 - |O_nn|^4)/2.
double long_time_echo(const OverlapMatrix& overlap, std::size_t n);

// P2 after the echo sequence from amplitude: (1 - Re A)/2, clamped at
// [-1e-9, 1+1e-9] against rounding.
double p2_from_echo_amplitude(std::complex<double> a);

}  // namespace echospec
