#include "qre/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qre {

namespace {

void require_unit_interval(double delta) {
    if (!(std::abs(delta) <= 1.0)) {
        std::ostringstream os;
        os << "delta = " << delta << " outside [-1, 1]";
        throw Error(ErrorCode::DomainError, os.str());
    }
}

} // namespace

CMatrix DiagonalPowerMap::evaluate(double delta) const {
    CMatrix f = CMatrix::Zero(size(), size());
    for (Index i = 0; i < size(); ++i)
        f(i, i) = scale * std::pow(delta, exponents[static_cast<std::size_t>(i)]);
    return f;
}

double DiagonalPowerMap::gain(double delta) const {
    double g = 0.0;
    for (int p : exponents) g = std::max(g, std::abs(scale * std::pow(delta, p)));
    return g;
}

void UncertaintyModel::validate() const {
    const Index r1 = f1.size();
    const Index r2 = f2.size();
    if (H1.cols() != r1 || H3.cols() != r1 || E.rows() != r1)
        throw Error(ErrorCode::ShapeMismatch, "H1, H3, E do not conform to F1");
    if (H2.cols() != r2 || G.rows() != r2) throw Error(ErrorCode::ShapeMismatch, "H2, G do not conform to F2");
    if (H1.rows() != E.cols()) throw Error(ErrorCode::ShapeMismatch, "H1 F1 E is not square");
    if (H2.rows() != H1.rows()) throw Error(ErrorCode::ShapeMismatch, "H2 row count differs from the state size");
}

UncertaintyModel squeezer_uncertainty(double alpha, double mu) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::DomainError, "alpha must be positive");
    if (!(mu >= 0.0 && mu < 1.0)) {
        std::ostringstream os;
        os << "mu = " << mu << " outside [0, 1)";
        throw Error(ErrorCode::DomainError, os.str());
    }
    const double a2 = alpha * alpha;
    UncertaintyModel u;
    u.H1 = CMatrix::Zero(2, 4);
    u.H1(0, 0) = u.H1(1, 1) = 2.0 * mu * a2;
    u.H1(0, 2) = u.H1(1, 3) = mu * mu * a2;
    u.H2 = -mu * alpha * identity(2);
    u.H3 = CMatrix::Zero(2, 4);
    u.H3(0, 0) = u.H3(1, 1) = -2.0 * mu * alpha;
    u.E = CMatrix::Zero(4, 2);
    u.E(0, 0) = u.E(1, 1) = u.E(2, 0) = u.E(3, 1) = -0.5;
    u.G  = identity(2);
    u.f1 = DiagonalPowerMap{{1, 1, 2, 2}, 1.0};
    u.f2 = DiagonalPowerMap{{1, 1}, 1.0};
    u.validate();
    return u;
}

DeltaTriple evaluate_deltas(const UncertaintyModel& u, double delta) {
    require_unit_interval(delta);
    const CMatrix f1 = u.f1.evaluate(delta);
    const CMatrix f2 = u.f2.evaluate(delta);
    return DeltaTriple{u.H1 * f1 * u.E, u.H2 * f2 * u.G, u.H3 * f1 * u.E};
}

ContractionReport contraction_check(const UncertaintyModel& u, const std::vector<double>& grid) {
    ContractionReport report;
    for (double d : grid) {
        require_unit_interval(d);
        ContractionEntry e{d, u.f1.gain(d), u.f2.gain(d)};
        if (e.f1_gain > 1.0 + kContractionTol || e.f2_gain > 1.0 + kContractionTol) report.pass = false;
        report.entries.push_back(e);
    }
    return report;
}

} // namespace qre
