#include "qre/hinf_synth.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qre/detail/parallel.hpp"

namespace qre {

namespace {

void require_positive_param(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be positive, got " << v;
        throw Error(ErrorCode::DomainError, os.str());
    }
}

// (I - e2^2 G^dag G)^{-1/2}; ScalingTooLarge when not positive definite.
CMatrix scaling_root(const CMatrix& g, double eps2) {
    const CMatrix m = identity(g.cols()) - eps2 * eps2 * g.adjoint() * g;
    try {
        return hermitian_inv_sqrt(m);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotPositiveDefinite)
            throw Error(ErrorCode::ScalingTooLarge, "scaling not positive definite: I - eps2^2 G^dag G");
        throw;
    }
}

void require_e2_positive(const CMatrix& e2) {
    if (!is_hermitian(e2, 1e-10)) throw Error(ErrorCode::SingularE2, "E2 is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(e2), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi) {
        std::ostringstream os;
        os << "E2 is not positive definite (min eig " << lo << ")";
        throw Error(ErrorCode::SingularE2, os.str());
    }
}

struct RawSystem {
    const CMatrix& A;
    const CMatrix& B_dist;
    const CMatrix& B_extra;
    const CMatrix& C;
    const CMatrix& D_dist;
    const CMatrix& L;
};

ScaledProblem assemble_scaled(const RawSystem& sys, const UncertaintyModel& u, const CMatrix& S, double gamma,
                              double eps1, double eps2) {
    require_positive_param(gamma, "gamma");
    require_positive_param(eps1, "eps1");
    require_positive_param(eps2, "eps2");
    u.validate();

    const Index n  = sys.A.rows();
    const Index mo = sys.C.rows();
    const Index p  = sys.L.rows();
    require_shape(sys.A, n, n, "A");
    if (sys.B_dist.rows() != n || sys.B_extra.rows() != n) throw Error(ErrorCode::ShapeMismatch, "B rows differ from A");
    require_shape(sys.C, mo, n, "C");
    require_shape(sys.D_dist, mo, sys.B_dist.cols(), "D");
    require_shape(sys.L, p, n, "L");
    require_shape(u.H1, n, u.f1.size(), "H1");
    require_shape(u.H2, n, u.f2.size(), "H2");
    require_shape(u.H3, mo, u.f1.size(), "H3");
    require_shape(u.E, u.f1.size(), n, "E");
    require_shape(u.G, u.f2.size(), sys.B_dist.cols(), "G");
    if (S.cols() != mo) throw Error(ErrorCode::ShapeMismatch, "S does not match the output width");

    const CMatrix w = scaling_root(u.G, eps2);
    const double k1 = gamma / eps1;
    const double k2 = gamma / eps2;

    ScaledProblem sp;
    sp.A     = sys.A;
    sp.C2    = sys.C;
    sp.S     = S;
    sp.gamma = gamma;
    sp.eps1  = eps1;
    sp.eps2  = eps2;
    sp.disturbance_cols = sys.B_dist.cols();

    const CMatrix bw  = sys.B_dist * w;
    const CMatrix kh1 = k1 * u.H1;
    const CMatrix kh2 = k2 * u.H2;
    sp.B1 = hstack({&bw, &sys.B_extra, &kh1, &kh2});

    const CMatrix e1e = eps1 * u.E;
    const CMatrix zg  = zeros(u.G.rows(), n);
    sp.C1 = vstack({&e1e, &zg, &sys.L});

    const CMatrix z1    = zeros(u.E.rows() + u.G.rows(), p);
    const CMatrix minus = -identity(p);
    sp.D12 = vstack({&z1, &minus});

    const CMatrix dw  = sys.D_dist * w;
    const CMatrix zx  = zeros(mo, sys.B_extra.cols());
    const CMatrix kh3 = k1 * u.H3;
    const CMatrix z2  = zeros(mo, u.H2.cols());
    sp.D21 = hstack({&dw, &zx, &kh3, &z2});

    sp.E1 = sp.D12.adjoint() * sp.D12;
    const CMatrix scale_inv = (identity(u.G.cols()) - eps2 * eps2 * u.G.adjoint() * u.G).inverse();
    sp.E2 = hermitian_part(S * sys.D_dist * scale_inv * sys.D_dist.adjoint() * S.adjoint() +
                           k1 * k1 * S * u.H3 * u.H3.adjoint() * S.adjoint());
    require_e2_positive(sp.E2);
    sp.validate();
    return sp;
}

} // namespace

void ScaledProblem::validate() const {
    const Index n = A.rows();
    require_shape(A, n, n, "Abar");
    if (B1.rows() != n || C1.cols() != n || C2.cols() != n)
        throw Error(ErrorCode::ShapeMismatch, "scaled matrices do not match the state size");
    if (D12.rows() != C1.rows() || D21.cols() != B1.cols() || D21.rows() != C2.rows() || S.cols() != C2.rows())
        throw Error(ErrorCode::ShapeMismatch, "scaled feedthroughs are not conformable");
    require_shape(E1, D12.cols(), D12.cols(), "E1bar");
    require_shape(E2, S.rows(), S.rows(), "E2bar");
    for (const CMatrix* m : {&A, &C2, &S, &B1, &C1, &D12, &D21, &E1, &E2}) require_finite(*m, "scaled problem");
    if (!is_hermitian(E1)) throw Error(ErrorCode::NotHermitian, "E1bar not Hermitian");
    if (!(gamma > 0.0 && eps1 > 0.0 && eps2 > 0.0)) throw Error(ErrorCode::DomainError, "gamma, eps1, eps2 must be > 0");
}

ScaledProblem assemble_classical(const QuantumPlant& plant, const UncertaintyModel& u, const CMatrix& S, double gamma,
                                 double eps1, double eps2) {
    plant.validate();
    if (plant.has_control_input())
        throw Error(ErrorCode::WrongTopology, "assemble_classical: plant has a control input");
    const CMatrix none = zeros(plant.A.rows(), 0);
    return assemble_scaled({plant.A.realization(), plant.B_dist, none, plant.C.realization(), plant.D, plant.L}, u, S,
                           gamma, eps1, eps2);
}

ScaledProblem assemble_feedback_classical(const QuantumPlant& plant, const UncertaintyModel& u, const CMatrix& S,
                                          double gamma, double eps1, double eps2) {
    plant.validate();
    return assemble_scaled({plant.A.realization(), plant.B_dist, plant.B_ctrl, plant.C.realization(), plant.D, plant.L},
                           u, S, gamma, eps1, eps2);
}

ScaledProblem assemble_augmented(const AugmentedSystem& aug, const AugmentedUncertainty& au, const CMatrix& S_a,
                                 double gamma, double eps1, double eps2) {
    const CMatrix none = zeros(aug.A.rows(), 0);
    return assemble_scaled({aug.A, aug.B, none, aug.C, aug.D, aug.L}, au, S_a, gamma, eps1, eps2);
}

ScaledProblem compose_augmented_problem(const ScaledProblem& pp, const CoherentController& ctrl, const CMatrix& S_a) {
    if (ctrl.feedback_capable) throw Error(ErrorCode::WrongTopology, "composition covers the no-feedback topology");
    ctrl.validate();
    const CMatrix& ac = ctrl.A.realization();

    ScaledProblem sp;
    sp.gamma = pp.gamma;
    sp.eps1  = pp.eps1;
    sp.eps2  = pp.eps2;
    sp.disturbance_cols = pp.disturbance_cols;
    sp.S = S_a;

    const CMatrix z12 = zeros(pp.A.rows(), ac.cols());
    const CMatrix bc2 = ctrl.b_in * pp.C2;
    sp.A = block2x2(pp.A, z12, bc2, ac);

    const CMatrix bd21 = ctrl.b_in * pp.D21;
    sp.B1 = vstack({&pp.B1, &bd21});

    const CMatrix c1z = zeros(pp.C1.rows(), ac.cols());
    sp.C1 = hstack({&pp.C1, &c1z});

    const CMatrix dc2 = ctrl.d_out * pp.C2;
    sp.C2 = hstack({&dc2, &ctrl.c_out});

    sp.D12 = pp.D12;
    sp.D21 = ctrl.d_out * pp.D21;
    sp.E1  = sp.D12.adjoint() * sp.D12;
    sp.E2  = hermitian_part(S_a * sp.D21 * sp.D21.adjoint() * S_a.adjoint());
    require_e2_positive(sp.E2);
    sp.validate();
    return sp;
}

std::string_view to_string(BkScaling s) noexcept {
    switch (s) {
    case BkScaling::gamma_squared: return "gamma_squared";
    case BkScaling::inverse_gamma_squared: return "inverse_gamma_squared";
    }
    return "unknown";
}

std::optional<BkScaling> parse_bk_scaling(std::string_view s) noexcept {
    if (s == "gamma_squared") return BkScaling::gamma_squared;
    if (s == "inverse_gamma_squared") return BkScaling::inverse_gamma_squared;
    return std::nullopt;
}

// ============================================================================
// Riccati equations and the filter
// ============================================================================

namespace {

CMatrix x_quadratic(const ScaledProblem& p) { return p.B1 * p.B1.adjoint() / (p.gamma * p.gamma); }

CMatrix x_constant(const ScaledProblem& p) {
    const CMatrix proj = identity(p.C1.rows()) - p.D12 * p.E1.inverse() * p.D12.adjoint();
    return hermitian_part(p.C1.adjoint() * proj * p.C1);
}

// S^dag E2^{-1} S
CMatrix measurement_weight(const ScaledProblem& p) {
    return hermitian_part(p.S.adjoint() * p.E2.inverse() * p.S);
}

// Y equation rewritten as A_c^dag Y + Y A_c + Y R Y + Q = 0.
CareInstance y_instance(const ScaledProblem& p) {
    const double  g  = p.gamma;
    const CMatrix w  = measurement_weight(p);
    const CMatrix ac = (p.A - p.B1 * p.D21.adjoint() * w * p.C2).adjoint();
    const CMatrix r  = hermitian_part(p.C1.adjoint() * p.C1 - g * g * p.C2.adjoint() * w * p.C2);
    const CMatrix q =
        hermitian_part(p.B1 * (identity(p.B1.cols()) - p.D21.adjoint() * w * p.D21) * p.B1.adjoint() / (g * g));
    return CareInstance{ac, r, q};
}

CareSolution solve_named(const CareInstance& inst, const char* name) {
    try {
        return solve_care(inst);
    } catch (const Error& e) {
        throw Error(ErrorCode::CareFailure, std::string(name) + " equation: " + e.what());
    }
}

} // namespace

double x_equation_residual(const ScaledProblem& p, const CMatrix& x) {
    const CMatrix q   = x_constant(p);
    const CMatrix res = p.A.adjoint() * x + x * p.A + x * x_quadratic(p) * x + q;
    return res.norm() / (1.0 + q.norm());
}

double y_equation_residual(const ScaledProblem& p, const CMatrix& y) {
    const double  g    = p.gamma;
    const CMatrix bbt  = p.B1 * p.B1.adjoint() / (g * g);
    const CMatrix m    = p.B1 * p.D21.adjoint() / g + g * y * p.C2.adjoint();
    const CMatrix res  = p.A * y + y * p.A.adjoint() + y * p.C1.adjoint() * p.C1 * y + bbt -
                        m * p.S.adjoint() * p.E2.inverse() * p.S * m.adjoint();
    return res.norm() / (1.0 + bbt.norm());
}

Estimator synthesize(const ScaledProblem& p, const SynthesisOptions& opts) {
    p.validate();
    const double g  = p.gamma;
    const double g2 = g * g;
    const Index  n  = p.A.rows();

    Estimator est;
    est.gamma   = g;
    est.eps1    = p.eps1;
    est.eps2    = p.eps2;
    est.S       = p.S;
    est.options = opts;

    est.X = solve_named(CareInstance{p.A, hermitian_part(x_quadratic(p)), x_constant(p)}, "X");
    est.Y = solve_named(y_instance(p), "Y");
    est.x_residual = x_equation_residual(p, est.X.X);
    est.y_residual = y_equation_residual(p, est.Y.X);
    if (!(est.x_residual <= kCareResidualGate))
        throw Error(ErrorCode::CareFailure, "X equation: residual of the original form exceeds the gate");
    if (!(est.y_residual <= kCareResidualGate))
        throw Error(ErrorCode::CareFailure, "Y equation: residual of the original form exceeds the gate");

    const double c = opts.coupling == CouplingForm::plain ? 1.0 : 1.0 / g2;
    const CMatrix coupling = identity(n) - c * est.Y.X * est.X.X;
    Eigen::JacobiSVD<CMatrix> svd(coupling);
    const double smin  = svd.singularValues()(n - 1);
    est.coupling_norm  = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
    if (!(est.coupling_norm <= kCouplingLimit)) {
        std::ostringstream os;
        os << "||(I - YX)^{-1}|| = " << est.coupling_norm;
        throw Error(ErrorCode::CouplingSingular, os.str());
    }

    const double lead = opts.gain == BkScaling::gamma_squared ? g2 : 1.0 / g2;
    const CMatrix inner = est.Y.X * p.C2.adjoint() * p.S.adjoint() + p.B1 * p.D21.adjoint() * p.S.adjoint() / g2;
    est.B_K = lead * coupling.fullPivLu().solve(inner) * p.E2.inverse();
    est.A_K = p.A - est.B_K * p.S * p.C2 + (p.B1 - est.B_K * p.S * p.D21) * p.B1.adjoint() * est.X.X / g2;
    est.C_K = -p.E1.inverse() * p.D12.adjoint() * p.C1;

    for (const CMatrix* m : {&est.A_K, &est.B_K, &est.C_K}) require_finite(*m, "estimator");
    est.spectral_abscissa = spectral_abscissa(est.A_K);
    est.stable            = est.spectral_abscissa < 0.0;
    if (opts.require_stable && !est.stable) {
        std::ostringstream os;
        os << "estimator spectral abscissa " << est.spectral_abscissa << " >= 0";
        throw Error(ErrorCode::UnstableEstimator, os.str());
    }
    return est;
}

// ============================================================================
// Scaling-parameter search
// ============================================================================

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi >= lo) || n == 0) throw Error(ErrorCode::DomainError, "log_grid needs 0 < lo <= hi, n > 0");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

EpsSearchResult eps_grid_search(const std::function<ScaledProblem(double, double)>& assemble,
                                const std::function<double(const Estimator&)>& objective,
                                const std::vector<double>& eps1_grid, const std::vector<double>& eps2_grid,
                                const SynthesisOptions& opts) {
    struct Outcome {
        double e1 = 0.0;
        double e2 = 0.0;
        std::optional<Estimator> est;
        double value = std::numeric_limits<double>::infinity();
    };

    std::vector<std::pair<double, double>> pairs;
    for (double e1 : eps1_grid)
        for (double e2 : eps2_grid) pairs.emplace_back(e1, e2);

    std::vector<Outcome> outcomes(pairs.size());
    detail::parallel_for(pairs.size(), [&](std::size_t i) {
        Outcome& o = outcomes[i];
        o.e1       = pairs[i].first;
        o.e2       = pairs[i].second;
        try {
            Estimator est  = synthesize(assemble(o.e1, o.e2), opts);
            const double v = objective(est);
            if (std::isfinite(v)) {
                o.value = v;
                o.est   = std::move(est);
            }
        } catch (const Error&) {
        }
    });

    EpsSearchResult best;
    best.value = std::numeric_limits<double>::infinity();
    bool found = false;
    for (Outcome& o : outcomes) {
        ++best.evaluated;
        if (!o.est) {
            ++best.failed;
            continue;
        }
        if (!found || o.value < best.value) {
            best.eps1      = o.e1;
            best.eps2      = o.e2;
            best.value     = o.value;
            best.estimator = std::move(*o.est);
            found          = true;
        }
    }
    if (!found) throw Error(ErrorCode::CareFailure, "no (eps1, eps2) pair in the grid admits a solution");
    return best;
}

} // namespace qre
