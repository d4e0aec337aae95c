#include "doctest.h"
#include "oracles.hpp"

#include "qre/analysis.hpp"
#include "qre/uncertainty.hpp"

using namespace qre;

TEST_SUITE("uncertainty-model") {

TEST_CASE("squeezer_uncertainty factors") {
    const UncertaintyModel u = squeezer_uncertainty(2.0, 0.1);
    CHECK((u.H2 + 0.2 * identity(2)).norm() < 1e-15);
    CHECK(u.H3(0, 0).real() == doctest::Approx(-0.4));
    CHECK(u.H3(1, 1).real() == doctest::Approx(-0.4));
    CHECK(u.H1(0, 0).real() == doctest::Approx(0.8));  // 2 mu alpha^2
    CHECK(u.H1(0, 2).real() == doctest::Approx(0.04)); // mu^2 alpha^2
    CHECK(u.E.rows() == 4);
    CHECK(u.E.cols() == 2);
    CHECK(u.G == identity(2));

    const UncertaintyModel zero = squeezer_uncertainty(2.0, 0.0);
    CHECK(zero.H1.norm() == 0.0);
    CHECK(zero.H2.norm() == 0.0);
    CHECK(zero.H3.norm() == 0.0);

    const UncertaintyModel fb = squeezer_uncertainty(std::sqrt(2.0), 0.1);
    CHECK((fb.H2 + 0.1 * std::sqrt(2.0) * identity(2)).norm() < 1e-15);

    CHECK_THROWS_AS(squeezer_uncertainty(2.0, 1.0), Error);
    CHECK_THROWS_AS(squeezer_uncertainty(2.0, -0.1), Error);
    CHECK_THROWS_AS(squeezer_uncertainty(0.0, 0.1), Error);
}

TEST_CASE("evaluate_deltas") {
    const UncertaintyModel u = squeezer_uncertainty(2.0, 0.1);

    const DeltaTriple z = evaluate_deltas(u, 0.0);
    CHECK(z.dA.norm() == 0.0);
    CHECK(z.dB.norm() == 0.0);
    CHECK(z.dC.norm() == 0.0);

    const DeltaTriple d = evaluate_deltas(u, -1.0);
    CHECK((d.dA - 0.38 * identity(2)).norm() < 1e-14);
    CHECK((d.dB - 0.2 * identity(2)).norm() < 1e-14);
    CHECK((d.dC + 0.2 * identity(2)).norm() < 1e-14);

    const auto ref = oracle::squeezer_deltas(2.0, 0.1, 0.5);
    const DeltaTriple h = evaluate_deltas(u, 0.5);
    CHECK((h.dA - ref.dA * identity(2)).norm() <= 1e-14);

    CHECK_THROWS_AS(evaluate_deltas(u, 1.0 + 1e-9), Error);
}

TEST_CASE("factorization identity over 101 deltas") {
    for (double alpha : {2.0, std::sqrt(2.0)}) {
        const UncertaintyModel u = squeezer_uncertainty(alpha, 0.1);
        for (double delta : linear_grid(-1.0, 1.0, 101)) {
            const auto        ref = oracle::squeezer_deltas(alpha, 0.1, delta);
            const DeltaTriple d   = evaluate_deltas(u, delta);
            for (Index i = 0; i < 2; ++i) {
                for (Index j = 0; j < 2; ++j) {
                    const double diag = i == j ? 1.0 : 0.0;
                    CHECK(std::abs(d.dA(i, j) - ref.dA * diag) <= 1e-13);
                    CHECK(std::abs(d.dB(i, j) - ref.dB * diag) <= 1e-13);
                    CHECK(std::abs(d.dC(i, j) - ref.dC * diag) <= 1e-13);
                }
            }
        }
    }
}

TEST_CASE("zero mu collapses every delta") {
    const UncertaintyModel u = squeezer_uncertainty(2.0, 0.0);
    for (double delta : linear_grid(-1.0, 1.0, 11)) {
        const DeltaTriple d = evaluate_deltas(u, delta);
        CHECK(d.dA.norm() + d.dB.norm() + d.dC.norm() == 0.0);
    }
}

TEST_CASE("contraction_check") {
    UncertaintyModel u = squeezer_uncertainty(2.0, 0.1);
    const ContractionReport ok = contraction_check(u, {-1.0, 0.0, 1.0});
    CHECK(ok.pass);
    CHECK(ok.entries.size() == 3);
    CHECK(ok.entries[0].f1_gain == doctest::Approx(1.0));
    CHECK(ok.entries[2].f2_gain == doctest::Approx(1.0));

    const ContractionReport half = contraction_check(u, {0.5});
    CHECK(half.entries[0].f1_gain == doctest::Approx(0.5));
    CHECK(half.entries[0].f2_gain == doctest::Approx(0.5));

    u.f1.scale = 1.5;
    const ContractionReport bad = contraction_check(u, {-1.0, 0.0, 1.0});
    CHECK_FALSE(bad.pass);
    CHECK(bad.entries[0].f1_gain == doctest::Approx(1.5));
    CHECK(bad.entries[1].f1_gain == 0.0);

    // gain() agrees with the singular values of the evaluated block
    for (double delta : {-0.7, 0.2, 0.9}) {
        CHECK(u.f1.gain(delta) == doctest::Approx(oracle::sigma_max(u.f1.evaluate(delta))).epsilon(1e-14));
    }
}

} // TEST_SUITE
