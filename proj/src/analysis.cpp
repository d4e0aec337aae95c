#include "qre/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qre/detail/parallel.hpp"

namespace qre {

void StateSpace::validate() const {
    const Index n = A.rows();
    require_shape(A, n, n, "state-space A");
    if (B.rows() != n || C.cols() != n) throw Error(ErrorCode::ShapeMismatch, "state-space B/C do not match A");
    require_shape(D, C.rows(), B.cols(), "state-space D");
}

StateSpace closed_loop_error_system(const CMatrix& A, const CMatrix& B, const CMatrix& C, const CMatrix& D,
                                    const CMatrix& L, const DeltaTriple& deltas, const Estimator& est,
                                    Channel channel) {
    const Index n = A.rows();
    require_shape(A, n, n, "A");
    require_shape(C, C.rows(), n, "C");
    require_shape(B, n, B.cols(), "B");
    require_shape(D, C.rows(), B.cols(), "D");
    require_shape(L, L.rows(), n, "L");
    require_shape(deltas.dA, n, n, "Delta A");
    require_shape(deltas.dB, n, B.cols(), "Delta B");
    require_shape(deltas.dC, C.rows(), n, "Delta C");
    const Index k = est.A_K.rows();
    require_shape(est.A_K, k, k, "A_K");
    require_shape(est.S, est.S.rows(), C.rows(), "estimator S");
    require_shape(est.B_K, k, est.S.rows(), "B_K");
    require_shape(est.C_K, L.rows(), k, "C_K");
    if (channel.first < 0 || channel.count < 1 || channel.first + channel.count > B.cols()) {
        std::ostringstream os;
        os << "channel [" << channel.first << ", " << channel.first + channel.count << ") outside " << B.cols()
           << " input columns";
        throw Error(ErrorCode::ChannelOutOfRange, os.str());
    }

    const CMatrix bks = est.B_K * est.S;
    const CMatrix a11 = A + deltas.dA;
    const CMatrix a12 = zeros(n, k);
    const CMatrix a21 = bks * (C + deltas.dC);

    StateSpace ss;
    ss.A = block2x2(a11, a12, a21, est.A_K);
    const CMatrix top    = (B + deltas.dB).middleCols(channel.first, channel.count);
    const CMatrix bottom = (bks * D).middleCols(channel.first, channel.count);
    ss.B = vstack({&top, &bottom});
    const CMatrix minus_l = -L;
    ss.C = hstack({&minus_l, &est.C_K});
    ss.D = zeros(L.rows(), channel.count);
    return ss;
}

namespace {

CVector poles(const CMatrix& a) {
    if (a.rows() == 0) return CVector(0);
    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    return es.eigenvalues();
}

CMatrix response(const StateSpace& ss, double omega) {
    const Index n = ss.states();
    if (n == 0) return ss.D;
    const CMatrix resolvent = Complex(0.0, omega) * identity(n) - ss.A;
    return ss.C * resolvent.partialPivLu().solve(ss.B) + ss.D;
}

// Boyd-Balakrishnan Hamiltonian; purely imaginary eigenvalues i w mark
// frequencies where sigma_max(G(i w)) == gamma.
CMatrix gain_hamiltonian(const StateSpace& ss, double gamma) {
    const Index q = ss.B.cols();
    const Index p = ss.C.rows();
    const double g2   = gamma * gamma;
    const CMatrix rinv = (ss.D.adjoint() * ss.D - g2 * identity(q)).inverse();
    const CMatrix sinv = (ss.D * ss.D.adjoint() - g2 * identity(p)).inverse();
    const CMatrix h11  = ss.A - ss.B * rinv * ss.D.adjoint() * ss.C;
    const CMatrix h12  = -gamma * ss.B * rinv * ss.B.adjoint();
    const CMatrix h21  = gamma * ss.C.adjoint() * sinv * ss.C;
    const CMatrix h22  = -ss.A.adjoint() + ss.C.adjoint() * ss.D * rinv * ss.B.adjoint();
    return block2x2(h11, h12, h21, h22);
}

std::vector<double> crossing_frequencies(const StateSpace& ss, double gamma) {
    const CMatrix h = gain_hamiltonian(ss, gamma);
    Eigen::ComplexEigenSolver<CMatrix> es(h, false);
    const double scale = std::max(1.0, h.norm());
    std::vector<double> out;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const Complex l = es.eigenvalues()(i);
        if (std::abs(l.real()) <= 1e-6 * scale) out.push_back(l.imag());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void require_no_axis_poles(const CVector& p) {
    for (Index i = 0; i < p.size(); ++i) {
        if (std::abs(p(i).real()) <= 1e-9 * std::max(1.0, std::abs(p(i)))) {
            std::ostringstream os;
            os << "pole " << p(i) << " on the imaginary axis";
            throw Error(ErrorCode::ImaginaryAxisPole, os.str());
        }
    }
}

} // namespace

std::vector<CMatrix> frequency_response(const StateSpace& ss, const std::vector<double>& omegas) {
    ss.validate();
    const CVector p = poles(ss.A);
    std::vector<CMatrix> out;
    out.reserve(omegas.size());
    for (double w : omegas) {
        for (Index i = 0; i < p.size(); ++i) {
            if (std::abs(Complex(0.0, w) - p(i)) <= 1e-12 * std::max(1.0, std::abs(w))) {
                std::ostringstream os;
                os << "i*" << w << " is an eigenvalue of A";
                throw Error(ErrorCode::SingularAtFrequency, os.str());
            }
        }
        out.push_back(response(ss, w));
    }
    return out;
}

double gain_at(const StateSpace& ss, double omega) { return max_singular_value(response(ss, omega)); }

PeakGain peak_gain(const StateSpace& ss, double rel_tol) {
    ss.validate();
    if (!(rel_tol > 0.0)) throw Error(ErrorCode::DomainError, "rel_tol must be positive");
    const CVector p = poles(ss.A);
    require_no_axis_poles(p);

    PeakGain best;
    best.stable = p.size() == 0 || p.real().maxCoeff() < 0.0;
    const double d_gain = max_singular_value(ss.D);
    best.value = d_gain;
    best.omega = std::numeric_limits<double>::infinity();

    auto probe = [&](double w) {
        const double g = gain_at(ss, w);
        if (g > best.value) {
            best.value = g;
            best.omega = w;
        }
    };

    // Initial lower bound: +-100-point log grid, DC, and the pole frequencies.
    double radius = 1.0;
    for (Index i = 0; i < p.size(); ++i) radius = std::max(radius, std::abs(p(i)));
    probe(0.0);
    for (int i = 0; i < 100; ++i) {
        const double w = std::pow(10.0, -3.0 + 6.0 * i / 99.0) * radius;
        probe(w);
        probe(-w);
    }
    for (Index i = 0; i < p.size(); ++i) probe(p(i).imag());

    if (best.value == 0.0) {
        best.omega = 0.0;
        return best;
    }

    double lo = best.value;
    double hi = 10.0 * lo + d_gain;
    // The bracket is normally valid at once; widen it if not.
    for (int guard = 0; guard < 60; ++guard) {
        bool exceeded = false;
        for (double w : crossing_frequencies(ss, hi)) {
            if (gain_at(ss, w) >= hi) exceeded = true;
            probe(w);
        }
        if (!exceeded) break;
        lo = best.value;
        hi *= 2.0;
    }
    lo = best.value;

    for (int iter = 0; iter < 200 && hi - lo > rel_tol * lo; ++iter) {
        const double gamma = 0.5 * (lo + hi);
        const std::vector<double> ws = crossing_frequencies(ss, gamma);
        for (double w : ws) probe(w);
        for (std::size_t i = 0; i + 1 < ws.size(); ++i) probe(0.5 * (ws[i] + ws[i + 1]));
        if (best.value >= gamma) {
            lo = best.value;
            if (lo > hi) hi = lo;
        } else {
            hi = gamma;
        }
    }
    best.upper = std::max(hi, best.value);
    if (!std::isfinite(best.omega)) best.omega = 0.0;
    return best;
}

PeakGain hinf_norm(const StateSpace& ss, double rel_tol) {
    ss.validate();
    const double a = spectral_abscissa(ss.A);
    if (!(a < 0.0)) {
        std::ostringstream os;
        os << "spectral abscissa " << a << " >= 0";
        throw Error(ErrorCode::UnstableSystem, os.str());
    }
    return peak_gain(ss, rel_tol);
}

SweepResult delta_sweep(const std::function<StateSpace(double)>& builder, const std::vector<double>& deltas,
                        std::string label, NormKind kind, double rel_tol) {
    for (double d : deltas) {
        if (!(std::abs(d) <= 1.0)) {
            std::ostringstream os;
            os << "sweep point delta = " << d << " outside [-1, 1]";
            throw Error(ErrorCode::DomainError, os.str());
        }
    }

    std::vector<PeakGain> gains(deltas.size());
    detail::parallel_for(deltas.size(), [&](std::size_t i) {
        try {
            const StateSpace ss = builder(deltas[i]);
            gains[i]            = kind == NormKind::hinf ? hinf_norm(ss, rel_tol) : peak_gain(ss, rel_tol);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "at delta = " << deltas[i] << ": " << e.what();
            throw Error(e.code(), os.str());
        }
    });

    SweepResult out;
    out.deltas = deltas;
    out.label  = std::move(label);
    for (const PeakGain& g : gains) {
        out.norms.push_back(g.value);
        out.peak_omegas.push_back(g.omega);
        out.stable.push_back(g.stable);
    }
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 0 || !(hi >= lo)) throw Error(ErrorCode::DomainError, "linear_grid needs n > 0 and hi >= lo");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

} // namespace qre
