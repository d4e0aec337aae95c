#include "qre/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qre {

bool all_finite(const CMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

void require_finite(const CMatrix& m, const char* what) {
    if (!all_finite(m)) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

void require_shape(const CMatrix& m, Index rows, Index cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << what << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
        throw Error(ErrorCode::ShapeMismatch, os.str());
    }
}

CMatrix adjoint(const CMatrix& m) { return m.adjoint(); }

CMatrix conjugate(const CMatrix& m) { return m.conjugate(); }

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double spectral_abscissa(const CMatrix& a) {
    if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::ComplexEigenSolver<CMatrix> es(a, false);
    return es.eigenvalues().real().maxCoeff();
}

double max_singular_value(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

CMatrix hstack(std::initializer_list<const CMatrix*> blocks) {
    Index rows = -1;
    Index cols = 0;
    for (const CMatrix* b : blocks) {
        if (rows < 0) rows = b->rows();
        if (b->rows() != rows) throw Error(ErrorCode::ShapeMismatch, "hstack: row counts differ");
        cols += b->cols();
    }
    CMatrix out(std::max<Index>(rows, 0), cols);
    Index c = 0;
    for (const CMatrix* b : blocks) {
        out.middleCols(c, b->cols()) = *b;
        c += b->cols();
    }
    return out;
}

CMatrix vstack(std::initializer_list<const CMatrix*> blocks) {
    Index cols = -1;
    Index rows = 0;
    for (const CMatrix* b : blocks) {
        if (cols < 0) cols = b->cols();
        if (b->cols() != cols) throw Error(ErrorCode::ShapeMismatch, "vstack: column counts differ");
        rows += b->rows();
    }
    CMatrix out(rows, std::max<Index>(cols, 0));
    Index r = 0;
    for (const CMatrix* b : blocks) {
        out.middleRows(r, b->rows()) = *b;
        r += b->rows();
    }
    return out;
}

CMatrix block2x2(const CMatrix& a11, const CMatrix& a12, const CMatrix& a21, const CMatrix& a22) {
    const CMatrix top    = hstack({&a11, &a12});
    const CMatrix bottom = hstack({&a21, &a22});
    return vstack({&top, &bottom});
}

CMatrix zeros(Index rows, Index cols) { return CMatrix::Zero(rows, cols); }

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

CMatrix hermitian_inv_sqrt(const CMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::ShapeMismatch, "hermitian_inv_sqrt: matrix not square");
    require_finite(m, "hermitian_inv_sqrt input");
    if (!is_hermitian(m)) throw Error(ErrorCode::NotHermitian, "hermitian_inv_sqrt: matrix not Hermitian");
    if (m.rows() == 0) return m;

    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
    const Eigen::VectorXd& w = es.eigenvalues();
    const double lo = w.minCoeff();
    const double hi = w.maxCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi) {
        std::ostringstream os;
        os << "eigenvalue floor violated (min " << lo << ", max " << hi << ")";
        throw Error(ErrorCode::NotPositiveDefinite, os.str());
    }
    const Eigen::VectorXd inv_root = w.array().rsqrt();
    const CMatrix& v = es.eigenvectors();
    return hermitian_part(v * inv_root.cast<Complex>().asDiagonal() * v.adjoint());
}

// ============================================================================
// Ordered complex Schur form
// ============================================================================

namespace {

// Swap diagonal entries k and k+1 of the upper-triangular T with a unitary
// plane rotation, accumulating it into U.
void swap_adjacent(CMatrix& t, CMatrix& u, Index k) {
    const Complex t11 = t(k, k);
    const Complex t12 = t(k, k + 1);
    const Complex t22 = t(k + 1, k + 1);

    // [t12; t22 - t11] is the eigenvector of the 2x2 block for t22.
    Complex a = t12;
    Complex b = t22 - t11;
    const double r = std::hypot(std::abs(a), std::abs(b));
    if (r == 0.0) return; // equal eigenvalues, nothing to do
    a /= r;
    b /= r;

    Eigen::Matrix2cd q;
    q << a, -std::conj(b), b, std::conj(a);

    const Index n = t.rows();
    t.block(k, 0, 2, n)    = q.adjoint() * t.block(k, 0, 2, n);
    t.block(0, k, n, 2)    = t.block(0, k, n, 2) * q;
    u.block(0, k, n, 2)    = u.block(0, k, n, 2) * q;
    t(k + 1, k)            = Complex(0.0, 0.0);
}

} // namespace

OrderedSchur ordered_schur(const CMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::ShapeMismatch, "ordered_schur: matrix not square");
    Eigen::ComplexSchur<CMatrix> cs(m);
    if (cs.info() != Eigen::Success) throw Error(ErrorCode::CareFailure, "complex Schur decomposition did not converge");

    OrderedSchur out{cs.matrixT(), cs.matrixU(), 0};
    const Index n = m.rows();
    // Strictly lower part is numerically zero already; clear it.
    for (Index j = 0; j < n; ++j)
        for (Index i = j + 1; i < n; ++i) out.T(i, j) = 0.0;

    Index placed = 0;
    for (Index j = 0; j < n; ++j) {
        if (out.T(j, j).real() < 0.0) {
            for (Index k = j; k > placed; --k) swap_adjacent(out.T, out.U, k - 1);
            ++placed;
        }
    }
    out.n_stable = placed;
    return out;
}

// ============================================================================
// Lyapunov and Riccati
// ============================================================================

CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& c) {
    const Index n = a.rows();
    require_shape(c, n, n, "Lyapunov right-hand side");
    Eigen::ComplexSchur<CMatrix> cs(a);
    const CMatrix& t = cs.matrixT();
    const CMatrix& q = cs.matrixU();

    // T^dag W + W T = Q^dag C Q, solved in increasing (i, j).
    const CMatrix rhs = q.adjoint() * c * q;
    CMatrix w         = CMatrix::Zero(n, n);
    const double scale = std::max(1.0, t.norm());
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            Complex acc = rhs(i, j);
            for (Index k = 0; k < i; ++k) acc -= std::conj(t(k, i)) * w(k, j);
            for (Index k = 0; k < j; ++k) acc -= w(i, k) * t(k, j);
            const Complex denom = std::conj(t(i, i)) + t(j, j);
            if (std::abs(denom) <= 1e-14 * scale)
                throw Error(ErrorCode::ImaginaryAxisEigenvalue, "Lyapunov operator is singular");
            w(i, j) = acc / denom;
        }
    }
    return q * w * q.adjoint();
}

void CareInstance::validate() const {
    const Index n = A.rows();
    if (A.cols() != n) throw Error(ErrorCode::ShapeMismatch, "CARE: A not square");
    require_shape(R, n, n, "CARE R");
    require_shape(Q, n, n, "CARE Q");
    require_finite(A, "CARE A");
    require_finite(R, "CARE R");
    require_finite(Q, "CARE Q");
    if (!is_hermitian(R)) throw Error(ErrorCode::NotHermitian, "CARE: R not Hermitian");
    if (!is_hermitian(Q)) throw Error(ErrorCode::NotHermitian, "CARE: Q not Hermitian");
}

namespace {

CMatrix care_operator(const CareInstance& inst, const CMatrix& x) {
    return inst.A.adjoint() * x + x * inst.A + x * inst.R * x + inst.Q;
}

} // namespace

double care_residual(const CareInstance& inst, const CMatrix& x) {
    return care_operator(inst, x).norm() / (1.0 + inst.Q.norm());
}

CareSolution solve_care(const CareInstance& inst) {
    inst.validate();
    const Index n = inst.A.rows();
    const CMatrix Rh = hermitian_part(inst.R);
    const CMatrix Qh = hermitian_part(inst.Q);
    const CMatrix minus_q   = -Qh;
    const CMatrix minus_adj = -inst.A.adjoint();
    const CMatrix h         = block2x2(inst.A, Rh, minus_q, minus_adj);

    OrderedSchur schur = ordered_schur(h);
    for (Index i = 0; i < 2 * n; ++i) {
        if (std::abs(schur.T(i, i).real()) < kImaginaryAxisGap) {
            std::ostringstream os;
            os << "Hamiltonian eigenvalue " << schur.T(i, i) << " lies on the imaginary axis";
            throw Error(ErrorCode::ImaginaryAxisEigenvalue, os.str());
        }
    }
    if (schur.n_stable != n) {
        std::ostringstream os;
        os << "Hamiltonian has " << schur.n_stable << " stable eigenvalues, expected " << n;
        throw Error(ErrorCode::ImaginaryAxisEigenvalue, os.str());
    }

    const CMatrix u1 = schur.U.topLeftCorner(n, n);
    const CMatrix u2 = schur.U.bottomLeftCorner(n, n);
    Eigen::JacobiSVD<CMatrix> svd(u1);
    const double smin = svd.singularValues()(n - 1);
    const double cond = smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond < kSingularU1Cond)) {
        std::ostringstream os;
        os << "stable subspace not complementary, cond(U1) = " << cond;
        throw Error(ErrorCode::SingularU1, os.str());
    }

    // X U1 = U2  <=>  U1^dag X^dag = U2^dag
    const CMatrix xt = u1.adjoint().fullPivLu().solve(u2.adjoint());
    CMatrix x        = hermitian_part(xt.adjoint());

    const CareInstance herm{inst.A, Rh, Qh};
    double residual = care_residual(herm, x);

    // One Newton (Kleinman) step: (A + R X)^dag D + D (A + R X) = -F(X).
    try {
        const CMatrix ak      = inst.A + Rh * x;
        const CMatrix delta   = solve_lyapunov(ak, -care_operator(herm, x));
        const CMatrix refined = hermitian_part(x + delta);
        const double  r2      = care_residual(herm, refined);
        if (all_finite(refined) && r2 < residual) {
            x        = refined;
            residual = r2;
        }
    } catch (const Error&) {
        // keep the subspace solution; the residual gate below decides
    }

    if (!(residual <= kCareResidualGate)) {
        std::ostringstream os;
        os << "relative residual " << residual << " exceeds " << kCareResidualGate;
        throw Error(ErrorCode::ResidualTooLarge, os.str());
    }
    const double abscissa = spectral_abscissa(inst.A + Rh * x);
    if (!(abscissa < 0.0)) {
        std::ostringstream os;
        os << "solution is not stabilizing (abscissa " << abscissa << ")";
        throw Error(ErrorCode::CareFailure, os.str());
    }
    return CareSolution{x, residual, abscissa, cond};
}

} // namespace qre
