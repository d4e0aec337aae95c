#pragma once

#include <vector>

#include "qre/linalg.hpp"

namespace qre {

// ============================================================================
// Doubled-up operators
// ============================================================================
// A linear quantum system acting on (a, a^#) has matrices of the form
//   Omega(M1, M2) = [[M1, M2], [conj(M2), conj(M1)]].

class DoubledOperator {
public:
    DoubledOperator() = default;

    // Throws ShapeMismatch when m1 and m2 differ in shape, NonFinite on NaN/Inf.
    DoubledOperator(CMatrix m1, CMatrix m2);

    // Accepts a 2p x 2q matrix whose conjugate-block structure holds to `tol`
    // (relative to max(1, ||m||_F)). Throws ShapeMismatch otherwise.
    static DoubledOperator from_realization(const CMatrix& m, double tol = 1e-12);

    [[nodiscard]] const CMatrix& m1() const noexcept { return m1_; }
    [[nodiscard]] const CMatrix& m2() const noexcept { return m2_; }
    [[nodiscard]] const CMatrix& realization() const noexcept { return full_; }
    [[nodiscard]] Index rows() const noexcept { return full_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return full_.cols(); }

    friend DoubledOperator operator+(const DoubledOperator& a, const DoubledOperator& b);
    friend DoubledOperator operator*(const DoubledOperator& a, const DoubledOperator& b);
    friend DoubledOperator operator*(double s, const DoubledOperator& a);

private:
    CMatrix m1_;
    CMatrix m2_;
    CMatrix full_;
};

[[nodiscard]] DoubledOperator omega(const CMatrix& m1, const CMatrix& m2);

// True when m has the conjugate-block structure to the given relative tolerance.
[[nodiscard]] bool has_doubled_structure(const CMatrix& m, double tol = 1e-12);

// ============================================================================
// Homodyne detection
// ============================================================================

struct HomodyneConfig {
    std::vector<double> angles; // radians, one per detected field
};

// S = [S1 S2], S1 = diag(e^{-i theta}/sqrt 2), S2 = diag(e^{i theta}/sqrt 2).
[[nodiscard]] CMatrix homodyne_matrix(const HomodyneConfig& cfg);

// ============================================================================
// Plants and coherent controllers
// ============================================================================

enum class Realizability { strict, permissive };

// Doubled-up plant: dx = A x dt + B_dist dA + B_ctrl dU, dY = C x dt + D dA, z = L x.
// B_ctrl is empty (2n x 0) for a plant without a control input.
struct QuantumPlant {
    Index           n_modes  = 0;
    Index           n_fields = 0;
    DoubledOperator A;
    CMatrix         B_dist;
    CMatrix         B_ctrl;
    DoubledOperator C;
    CMatrix         D;
    CMatrix         L;
    bool            physically_realizable = false;

    [[nodiscard]] bool has_control_input() const noexcept { return B_ctrl.cols() > 0; }
    // [B_dist B_ctrl]
    [[nodiscard]] CMatrix B_full() const;
    // [D 0], zero block over the control input columns
    [[nodiscard]] CMatrix D_full() const;

    void validate() const;
};

// Coherent controller. Role names:
//   b_in        plant output Y -> controller state         (B_c, B_c2)
//   c_out       controller state -> detected output Y~     (C_c, C~_c)
//   d_out       Y -> Y~ feedthrough                        (D_c, D~_c2)
// and, for the feedback-capable form only,
//   b_aux       auxiliary field A~ -> controller state     (B_c1)
//   c_fb        controller state -> plant control input U  (C_c)
//   d_out_aux   A~ -> Y~                                   (D~_c1)
//   d_fb_aux    A~ -> U                                    (D_c1)
//   d_fb_in     Y  -> U                                    (D_c2)
struct CoherentController {
    Index           n_modes = 0;
    DoubledOperator A;
    CMatrix         b_in;
    CMatrix         c_out;
    CMatrix         d_out;
    CMatrix         b_aux;
    CMatrix         c_fb;
    CMatrix         d_out_aux;
    CMatrix         d_fb_aux;
    CMatrix         d_fb_in;
    bool            feedback_capable      = false;
    bool            physically_realizable = false;

    void validate() const;
};

inline constexpr double kRealizabilityTol = 1e-12;

// Single-mode squeezer A = Omega(-beta/2, -chi), B = -sqrt(kappa) I, C = sqrt(kappa) I, D = I.
// `estimand` is the 1x2 row L. Realizable iff beta == kappa.
[[nodiscard]] QuantumPlant squeezer_plant(double beta, double kappa, Complex chi, const CMatrix& estimand,
                                          Realizability mode = Realizability::strict);

// Squeezer with an additional control input: B_dist = -sqrt(k1) I, B_ctrl = -sqrt(k2) I,
// C = sqrt(k1) I. Realizable iff beta == k1 + k2.
[[nodiscard]] QuantumPlant feedback_squeezer_plant(double beta, double kappa1, double kappa2, Complex chi,
                                                   const CMatrix& estimand,
                                                   Realizability mode = Realizability::strict);

[[nodiscard]] CoherentController squeezer_controller(double beta_c, double kappa_c, Complex chi_c,
                                                     Realizability mode = Realizability::strict);

// Y~ = sqrt(kc1) a_c + A~, U = sqrt(kc2) a_c + Y. Realizable iff beta_c == kc1 + kc2.
[[nodiscard]] CoherentController feedback_squeezer_controller(double beta_c, double kappa_c1, double kappa_c2,
                                                              Complex chi_c,
                                                              Realizability mode = Realizability::strict);

} // namespace qre
