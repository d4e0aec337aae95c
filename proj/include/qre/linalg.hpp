#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qre/error.hpp"

namespace qre {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index   = Eigen::Index;

// ============================================================================
// Basic helpers
// ============================================================================

[[nodiscard]] bool all_finite(const CMatrix& m);

// Throws NonFinite when any entry is NaN/Inf. `what` names the matrix in the message.
void require_finite(const CMatrix& m, const char* what);

// Throws ShapeMismatch unless m is rows x cols.
void require_shape(const CMatrix& m, Index rows, Index cols, const char* what);

[[nodiscard]] CMatrix adjoint(const CMatrix& m);

// Entrywise complex conjugate (the '#' operation on matrices).
[[nodiscard]] CMatrix conjugate(const CMatrix& m);

// ||M - M^dagger||_F <= tol * max(1, ||M||_F)
[[nodiscard]] bool is_hermitian(const CMatrix& m, double tol = 1e-12);

[[nodiscard]] CMatrix hermitian_part(const CMatrix& m);

// Largest real part over the spectrum of a square matrix. -inf for 0x0.
[[nodiscard]] double spectral_abscissa(const CMatrix& a);

[[nodiscard]] double max_singular_value(const CMatrix& m);

// Block helpers for assembling state-space realizations.
[[nodiscard]] CMatrix hstack(std::initializer_list<const CMatrix*> blocks);
[[nodiscard]] CMatrix vstack(std::initializer_list<const CMatrix*> blocks);
[[nodiscard]] CMatrix block2x2(const CMatrix& a11, const CMatrix& a12, const CMatrix& a21, const CMatrix& a22);
[[nodiscard]] CMatrix zeros(Index rows, Index cols);
[[nodiscard]] CMatrix identity(Index n);

// Hermitian P with P M P = I, for Hermitian positive definite M.
// Throws NotPositiveDefinite when min eig <= 1e-12 * max eig.
[[nodiscard]] CMatrix hermitian_inv_sqrt(const CMatrix& m);

// ============================================================================
// Continuous algebraic Riccati equation
//   A^dagger X + X A + X R X + Q = 0
// ============================================================================

struct CareInstance {
    CMatrix A;
    CMatrix R;
    CMatrix Q;

    // Throws ShapeMismatch / NotHermitian / NonFinite.
    void validate() const;
};

struct CareSolution {
    CMatrix X;
    double  residual             = 0.0; // ||A^dag X + XA + XRX + Q||_F / (1 + ||Q||_F)
    double  closed_loop_abscissa = 0.0; // max Re eig(A + R X)
    double  u1_condition         = 0.0;
};

inline constexpr double kCareResidualGate   = 1e-8;
inline constexpr double kImaginaryAxisGap   = 1e-9;
inline constexpr double kSingularU1Cond     = 1e12;

// Relative CARE residual as defined for CareSolution.
[[nodiscard]] double care_residual(const CareInstance& inst, const CMatrix& x);

// Stabilizing solution through the ordered Schur form of the Hamiltonian
// [[A, R], [-Q, -A^dagger]], followed by one Newton step.
[[nodiscard]] CareSolution solve_care(const CareInstance& inst);

// Solves A^dagger Z + Z A = C by Bartels-Stewart on the complex Schur form of A.
// Throws ImaginaryAxisEigenvalue when conj(l_i) + l_j vanishes for some pair.
[[nodiscard]] CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& c);

struct OrderedSchur {
    CMatrix T;       // upper triangular
    CMatrix U;       // unitary, M = U T U^dagger
    Index   n_stable = 0; // leading diagonal entries with Re < 0
};

// Complex Schur decomposition with eigenvalues of negative real part moved to
// the leading block.
[[nodiscard]] OrderedSchur ordered_schur(const CMatrix& m);

} // namespace qre
