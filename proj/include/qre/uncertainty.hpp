#pragma once

#include <vector>

#include "qre/linalg.hpp"

namespace qre {

// Contraction block F(delta) = scale * diag(delta^p_0, delta^p_1, ...).
// Kept as structure rather than a closure so the bound F^dag F <= I can be
// checked exactly.
struct DiagonalPowerMap {
    std::vector<int> exponents;
    double           scale = 1.0;

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(exponents.size()); }
    [[nodiscard]] CMatrix evaluate(double delta) const;
    // Largest singular value of evaluate(delta), in closed form.
    [[nodiscard]] double gain(double delta) const;
};

// Delta A = H1 F1 E, Delta B = H2 F2 G, Delta C = H3 F1 E.
struct UncertaintyModel {
    CMatrix          H1;
    CMatrix          H2;
    CMatrix          H3;
    CMatrix          E;
    CMatrix          G;
    DiagonalPowerMap f1;
    DiagonalPowerMap f2;

    // Throws ShapeMismatch when the factors are not conformable.
    void validate() const;
};

struct DeltaTriple {
    CMatrix dA;
    CMatrix dB;
    CMatrix dC;
};

// Uncertainty in alpha = sqrt(kappa), alpha -> alpha (1 + mu delta), factored
// for the single-mode squeezer. Throws DomainError unless alpha > 0, 0 <= mu < 1.
[[nodiscard]] UncertaintyModel squeezer_uncertainty(double alpha, double mu);

// Throws DomainError when |delta| > 1.
[[nodiscard]] DeltaTriple evaluate_deltas(const UncertaintyModel& u, double delta);

struct ContractionEntry {
    double delta   = 0.0;
    double f1_gain = 0.0;
    double f2_gain = 0.0;
};

struct ContractionReport {
    std::vector<ContractionEntry> entries;
    bool                          pass = true;
};

inline constexpr double kContractionTol = 1e-12;

// Throws DomainError for grid points outside [-1, 1].
[[nodiscard]] ContractionReport contraction_check(const UncertaintyModel& u, const std::vector<double>& grid);

} // namespace qre
