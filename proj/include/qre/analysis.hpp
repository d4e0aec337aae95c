#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qre/hinf_synth.hpp"
#include "qre/linalg.hpp"
#include "qre/uncertainty.hpp"

namespace qre {

struct StateSpace {
    CMatrix A;
    CMatrix B;
    CMatrix C;
    CMatrix D;

    [[nodiscard]] Index states() const noexcept { return A.rows(); }
    void validate() const;
};

// Contiguous block of input columns.
struct Channel {
    Index first = 0;
    Index count = 1;

    // First m columns of a doubled input (the A block, not A^#).
    [[nodiscard]] static Channel field(Index m) { return Channel{0, m}; }
};

// e = C_K xhat - L x driven by the selected input columns:
//   A_cl = [[A + dA, 0], [B_K S (C + dC), A_K]], B_cl = [B + dB; B_K S D], C_cl = [-L, C_K], D_cl = 0.
// dA, dB, dC must have the shapes of A, B, C. Throws ShapeMismatch, ChannelOutOfRange.
[[nodiscard]] StateSpace closed_loop_error_system(const CMatrix& A, const CMatrix& B, const CMatrix& C,
                                                  const CMatrix& D, const CMatrix& L, const DeltaTriple& deltas,
                                                  const Estimator& est, Channel channel);

// G(i w) = C (i w I - A)^{-1} B + D. Throws SingularAtFrequency when i w is
// within 1e-12 of an eigenvalue of A.
[[nodiscard]] std::vector<CMatrix> frequency_response(const StateSpace& ss, const std::vector<double>& omegas);

// Largest singular value of G(i w).
[[nodiscard]] double gain_at(const StateSpace& ss, double omega);

struct PeakGain {
    double value = 0.0; // attained gain at `omega`, a lower bound within rel_tol of the supremum
    double omega = 0.0; // rad/s, may be negative for complex systems
    double upper = 0.0; // certified upper bound
    bool   stable = false;
};

// sup over real w of sigma_max(G(i w)) by Hamiltonian bisection. Valid for
// any system without imaginary-axis poles (ImaginaryAxisPole otherwise).
[[nodiscard]] PeakGain peak_gain(const StateSpace& ss, double rel_tol = 1e-8);

// H-infinity norm; throws UnstableSystem unless A is Hurwitz.
[[nodiscard]] PeakGain hinf_norm(const StateSpace& ss, double rel_tol = 1e-8);

enum class NormKind {
    hinf, // stable systems only
    peak, // L-infinity peak gain, permitted for unstable loops
};

struct SweepResult {
    std::vector<double> deltas;
    std::vector<double> norms;
    std::vector<double> peak_omegas;
    std::vector<bool>   stable;
    std::string         label;
};

// One norm per grid point, evaluated in parallel. Failures are rethrown with
// the offending delta in the message.
[[nodiscard]] SweepResult delta_sweep(const std::function<StateSpace(double)>& builder,
                                      const std::vector<double>& deltas, std::string label,
                                      NormKind kind = NormKind::peak, double rel_tol = 1e-8);

[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, std::size_t n);

} // namespace qre
