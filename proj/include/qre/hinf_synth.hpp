#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qre/augmentation.hpp"
#include "qre/linalg.hpp"
#include "qre/quantum_model.hpp"
#include "qre/uncertainty.hpp"

namespace qre {

// Scaled H-infinity problem for a (possibly augmented) uncertain system.
//   B1  = [B W, B_extra, (g/e1) H1, (g/e2) H2],  W = (I - e2^2 G^dag G)^{-1/2}
//   C1  = [e1 E; 0; L],  D12 = [0; 0; -I]
//   D21 = [D W, 0, (g/e1) H3, 0]
//   E1  = D12^dag D12,  E2 = S D (I - e2^2 G^dag G)^{-1} D^dag S^dag + (g/e1)^2 S H3 H3^dag S^dag
struct ScaledProblem {
    CMatrix A;
    CMatrix C2;
    CMatrix S;
    CMatrix B1;
    CMatrix C1;
    CMatrix D12;
    CMatrix D21;
    CMatrix E1;
    CMatrix E2;
    double  gamma = 0.0;
    double  eps1  = 0.0;
    double  eps2  = 0.0;
    Index   disturbance_cols = 0; // width of the W-scaled leading block of B1

    void validate() const;
};

// Throws ScalingTooLarge when I - e2^2 G^dag G is not positive definite,
// SingularE2 when E2 is not, DomainError for non-positive gamma/eps.
[[nodiscard]] ScaledProblem assemble_classical(const QuantumPlant& plant, const UncertaintyModel& u, const CMatrix& S,
                                               double gamma, double eps1, double eps2);

// Plant with a control input; B2 enters B1 unscaled, with a zero block in D21.
[[nodiscard]] ScaledProblem assemble_feedback_classical(const QuantumPlant& plant, const UncertaintyModel& u,
                                                        const CMatrix& S, double gamma, double eps1, double eps2);

[[nodiscard]] ScaledProblem assemble_augmented(const AugmentedSystem& aug, const AugmentedUncertainty& au,
                                               const CMatrix& S_a, double gamma, double eps1, double eps2);

// Builds the no-feedback augmented problem from the plant's scaled matrices:
//   A_a = [[A, 0], [B_c C2, A_c]], B_a1 = [B1; B_c D21], C_a1 = [C1, 0],
//   C_a2 = [D_c C2, C_c], D_a12 = D12, D_a21 = D_c D21.
[[nodiscard]] ScaledProblem compose_augmented_problem(const ScaledProblem& plant_problem,
                                                      const CoherentController& ctrl, const CMatrix& S_a);

// Leading factor of the filter gain B_K = k (I - c Y X)^{-1} (Y C2^dag S^dag + g^-2 B1 D21^dag S^dag) E2^{-1}.
enum class BkScaling {
    gamma_squared,         // k = g^2
    inverse_gamma_squared, // k = g^-2; reproduces the reference squeezer tables
};

enum class CouplingForm {
    plain,        // c = 1
    gamma_scaled, // c = g^-2
};

[[nodiscard]] std::string_view to_string(BkScaling s) noexcept;
[[nodiscard]] std::optional<BkScaling> parse_bk_scaling(std::string_view s) noexcept;

struct SynthesisOptions {
    BkScaling    gain           = BkScaling::gamma_squared;
    CouplingForm coupling       = CouplingForm::plain;
    bool         require_stable = false; // throw UnstableEstimator instead of only reporting
};

inline constexpr double kCouplingLimit = 1e12;

struct Estimator {
    CMatrix      A_K;
    CMatrix      B_K;
    CMatrix      C_K;
    CMatrix      S;      // measurement map the filter was built for
    CareSolution X;
    CareSolution Y;
    double       gamma = 0.0;
    double       eps1  = 0.0;
    double       eps2  = 0.0;
    double       x_residual = 0.0;    // residual of the X equation as written, relative
    double       y_residual = 0.0;    // residual of the Y equation as written, relative
    double       coupling_norm = 0.0; // ||(I - c Y X)^{-1}||_2
    double       spectral_abscissa = 0.0;
    bool         stable = false;
    SynthesisOptions options;
};

// Relative residuals of the two Riccati equations in their original
// (untransformed) form.
[[nodiscard]] double x_equation_residual(const ScaledProblem& p, const CMatrix& x);
[[nodiscard]] double y_equation_residual(const ScaledProblem& p, const CMatrix& y);

// Throws CareFailure (message names the X or Y equation), CouplingSingular,
// UnstableEstimator (only with require_stable).
[[nodiscard]] Estimator synthesize(const ScaledProblem& p, const SynthesisOptions& opts = {});

// ============================================================================
// Scaling-parameter search
// ============================================================================

struct EpsSearchResult {
    double    eps1  = 0.0;
    double    eps2  = 0.0;
    double    value = 0.0;
    Estimator estimator;
    std::size_t evaluated = 0;
    std::size_t failed    = 0;
};

[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t n);

// Evaluates every (eps1, eps2) pair in parallel, skipping pairs where assembly
// or synthesis fails, and returns the pair minimising `objective`.
// Throws CareFailure when no pair succeeds.
[[nodiscard]] EpsSearchResult eps_grid_search(const std::function<ScaledProblem(double, double)>& assemble,
                                              const std::function<double(const Estimator&)>& objective,
                                              const std::vector<double>& eps1_grid,
                                              const std::vector<double>& eps2_grid,
                                              const SynthesisOptions& opts = {});

} // namespace qre
