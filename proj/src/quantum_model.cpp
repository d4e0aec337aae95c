#include "qre/quantum_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qre {

namespace {

CMatrix assemble_doubled(const CMatrix& m1, const CMatrix& m2) {
    const CMatrix c2 = m2.conjugate();
    const CMatrix c1 = m1.conjugate();
    return block2x2(m1, m2, c2, c1);
}

bool realizable(double beta, double loss_sum) {
    return std::abs(beta - loss_sum) <= kRealizabilityTol * std::max(1.0, std::abs(beta));
}

void enforce(bool ok, Realizability mode, const std::string& what) {
    if (!ok && mode == Realizability::strict) throw Error(ErrorCode::NotPhysicallyRealizable, what);
}

CMatrix scalar_identity(double s) { return s * identity(2); }

} // namespace

DoubledOperator::DoubledOperator(CMatrix m1, CMatrix m2) : m1_(std::move(m1)), m2_(std::move(m2)) {
    if (m1_.rows() != m2_.rows() || m1_.cols() != m2_.cols())
        throw Error(ErrorCode::ShapeMismatch, "Omega blocks must have the same shape");
    require_finite(m1_, "Omega block M1");
    require_finite(m2_, "Omega block M2");
    full_ = assemble_doubled(m1_, m2_);
}

bool has_doubled_structure(const CMatrix& m, double tol) {
    if (m.rows() % 2 != 0 || m.cols() % 2 != 0) return false;
    const Index p = m.rows() / 2;
    const Index q = m.cols() / 2;
    const double scale = tol * std::max(1.0, m.norm());
    const double e1 = (m.bottomRightCorner(p, q) - m.topLeftCorner(p, q).conjugate()).norm();
    const double e2 = (m.bottomLeftCorner(p, q) - m.topRightCorner(p, q).conjugate()).norm();
    return e1 <= scale && e2 <= scale;
}

DoubledOperator DoubledOperator::from_realization(const CMatrix& m, double tol) {
    if (!has_doubled_structure(m, tol))
        throw Error(ErrorCode::ShapeMismatch, "matrix lacks the conjugate-block structure");
    const Index p = m.rows() / 2;
    const Index q = m.cols() / 2;
    return DoubledOperator(m.topLeftCorner(p, q), m.topRightCorner(p, q));
}

DoubledOperator operator+(const DoubledOperator& a, const DoubledOperator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::ShapeMismatch, "DoubledOperator sum: shapes differ");
    return DoubledOperator(a.m1_ + b.m1_, a.m2_ + b.m2_);
}

DoubledOperator operator*(const DoubledOperator& a, const DoubledOperator& b) {
    if (a.m1_.cols() != b.m1_.rows())
        throw Error(ErrorCode::ShapeMismatch, "DoubledOperator product: inner dimensions differ");
    // Omega(A1,A2) Omega(B1,B2) = Omega(A1 B1 + A2 B2#, A1 B2 + A2 B1#)
    return DoubledOperator(a.m1_ * b.m1_ + a.m2_ * b.m2_.conjugate(), a.m1_ * b.m2_ + a.m2_ * b.m1_.conjugate());
}

DoubledOperator operator*(double s, const DoubledOperator& a) { return DoubledOperator(s * a.m1_, s * a.m2_); }

DoubledOperator omega(const CMatrix& m1, const CMatrix& m2) { return DoubledOperator(m1, m2); }

CMatrix homodyne_matrix(const HomodyneConfig& cfg) {
    const Index m = static_cast<Index>(cfg.angles.size());
    CMatrix s     = CMatrix::Zero(m, 2 * m);
    const double r = 1.0 / std::numbers::sqrt2;
    for (Index i = 0; i < m; ++i) {
        const double th = cfg.angles[static_cast<std::size_t>(i)];
        if (!std::isfinite(th)) throw Error(ErrorCode::DomainError, "homodyne angle is not finite");
        s(i, i)     = std::polar(r, -th);
        s(i, m + i) = std::polar(r, th);
    }
    return s;
}

CMatrix QuantumPlant::B_full() const { return hstack({&B_dist, &B_ctrl}); }

CMatrix QuantumPlant::D_full() const {
    const CMatrix pad = zeros(D.rows(), B_ctrl.cols());
    return hstack({&D, &pad});
}

void QuantumPlant::validate() const {
    const Index n2 = 2 * n_modes;
    const Index m2 = 2 * n_fields;
    require_shape(A.realization(), n2, n2, "plant A");
    require_shape(B_dist, n2, m2, "plant B");
    if (B_ctrl.rows() != n2) throw Error(ErrorCode::ShapeMismatch, "plant control input has wrong row count");
    require_shape(C.realization(), m2, n2, "plant C");
    require_shape(D, m2, m2, "plant D");
    if (L.cols() != n2) throw Error(ErrorCode::ShapeMismatch, "estimand L has wrong column count");
}

void CoherentController::validate() const {
    const Index n2 = 2 * n_modes;
    require_shape(A.realization(), n2, n2, "controller A");
    if (b_in.rows() != n2 || c_out.cols() != n2)
        throw Error(ErrorCode::ShapeMismatch, "controller input/output blocks do not match its state");
    if (d_out.rows() != c_out.rows() || d_out.cols() != b_in.cols())
        throw Error(ErrorCode::ShapeMismatch, "controller feedthrough does not match its ports");
    if (feedback_capable) {
        if (b_aux.rows() != n2 || c_fb.cols() != n2)
            throw Error(ErrorCode::ShapeMismatch, "controller feedback blocks do not match its state");
        if (d_out_aux.rows() != c_out.rows() || d_out_aux.cols() != b_aux.cols() ||
            d_fb_aux.rows() != c_fb.rows() || d_fb_aux.cols() != b_aux.cols() ||
            d_fb_in.rows() != c_fb.rows() || d_fb_in.cols() != b_in.cols())
            throw Error(ErrorCode::ShapeMismatch, "controller feedback feedthroughs do not match its ports");
    }
}

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be positive, got " << v;
        throw Error(ErrorCode::DomainError, os.str());
    }
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be nonnegative, got " << v;
        throw Error(ErrorCode::DomainError, os.str());
    }
}

DoubledOperator squeezer_drift(double beta, Complex chi) {
    return omega(CMatrix::Constant(1, 1, Complex(-beta / 2.0, 0.0)), CMatrix::Constant(1, 1, -chi));
}

} // namespace

QuantumPlant squeezer_plant(double beta, double kappa, Complex chi, const CMatrix& estimand, Realizability mode) {
    require_positive(beta, "beta");
    require_positive(kappa, "kappa");
    require_finite(estimand, "estimand L");
    const bool ok = realizable(beta, kappa);
    enforce(ok, mode, "squeezer violates beta == kappa");

    const double a = std::sqrt(kappa);
    QuantumPlant p;
    p.n_modes  = 1;
    p.n_fields = 1;
    p.A        = squeezer_drift(beta, chi);
    p.B_dist   = scalar_identity(-a);
    p.B_ctrl   = zeros(2, 0);
    p.C        = omega(CMatrix::Constant(1, 1, a), CMatrix::Zero(1, 1));
    p.D        = identity(2);
    p.L        = estimand;
    p.physically_realizable = ok;
    p.validate();
    return p;
}

QuantumPlant feedback_squeezer_plant(double beta, double kappa1, double kappa2, Complex chi, const CMatrix& estimand,
                                     Realizability mode) {
    require_positive(beta, "beta");
    require_nonnegative(kappa1, "kappa1");
    require_nonnegative(kappa2, "kappa2");
    require_finite(estimand, "estimand L");
    const bool ok = realizable(beta, kappa1 + kappa2);
    enforce(ok, mode, "feedback squeezer violates beta == kappa1 + kappa2");

    const double a1 = std::sqrt(kappa1);
    QuantumPlant p;
    p.n_modes  = 1;
    p.n_fields = 1;
    p.A        = squeezer_drift(beta, chi);
    p.B_dist   = scalar_identity(-a1);
    p.B_ctrl   = scalar_identity(-std::sqrt(kappa2));
    p.C        = omega(CMatrix::Constant(1, 1, a1), CMatrix::Zero(1, 1));
    p.D        = identity(2);
    p.L        = estimand;
    p.physically_realizable = ok;
    p.validate();
    return p;
}

CoherentController squeezer_controller(double beta_c, double kappa_c, Complex chi_c, Realizability mode) {
    require_positive(beta_c, "beta_c");
    require_positive(kappa_c, "kappa_c");
    const bool ok = realizable(beta_c, kappa_c);
    enforce(ok, mode, "squeezer controller violates beta_c == kappa_c");

    const double a = std::sqrt(kappa_c);
    CoherentController c;
    c.n_modes = 1;
    c.A       = squeezer_drift(beta_c, chi_c);
    c.b_in    = scalar_identity(-a);
    c.c_out   = scalar_identity(a);
    c.d_out   = identity(2);
    c.physically_realizable = ok;
    c.validate();
    return c;
}

CoherentController feedback_squeezer_controller(double beta_c, double kappa_c1, double kappa_c2, Complex chi_c,
                                                Realizability mode) {
    require_positive(beta_c, "beta_c");
    require_nonnegative(kappa_c1, "kappa_c1");
    require_nonnegative(kappa_c2, "kappa_c2");
    const bool ok = realizable(beta_c, kappa_c1 + kappa_c2);
    enforce(ok, mode, "feedback squeezer controller violates beta_c == kappa_c1 + kappa_c2");

    const double a1 = std::sqrt(kappa_c1);
    const double a2 = std::sqrt(kappa_c2);
    CoherentController c;
    c.n_modes   = 1;
    c.A         = squeezer_drift(beta_c, chi_c);
    c.b_aux     = scalar_identity(-a1);
    c.b_in      = scalar_identity(-a2);
    c.c_out     = scalar_identity(a1);
    c.c_fb      = scalar_identity(a2);
    c.d_out_aux = identity(2);
    c.d_out     = zeros(2, 2);
    c.d_fb_aux  = zeros(2, 2);
    c.d_fb_in   = identity(2);
    c.feedback_capable      = true;
    c.physically_realizable = ok;
    c.validate();
    return c;
}

} // namespace qre
