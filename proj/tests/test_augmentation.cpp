#include "doctest.h"
#include "oracles.hpp"

#include "qre/augmentation.hpp"
#include "qre/hinf_synth.hpp"

using namespace qre;

namespace {

const double kSqrt2 = std::sqrt(2.0);

CMatrix estimand() {
    CMatrix l(1, 2);
    l << 0.1, -0.1;
    return l;
}

CoherentController pass_through(Index modes) {
    CoherentController c;
    c.n_modes = modes;
    c.A       = omega(-3.0 * identity(modes), CMatrix::Zero(modes, modes));
    c.b_in    = CMatrix::Zero(2 * modes, 2);
    c.c_out   = CMatrix::Zero(2, 2 * modes);
    c.d_out   = identity(2);
    return c;
}

const double kDeltas[] = {-1.0, -0.5, 0.0, 0.5, 1.0};

} // namespace

TEST_SUITE("augmentation") {

TEST_CASE("augment") {
    const QuantumPlant plant = squeezer_plant(4, 4, 0.5, estimand());

    SUBCASE("pass-through controller") {
        const AugmentedSystem s = augment(plant, pass_through(1));
        CHECK(s.A.topRightCorner(2, 2).norm() == 0.0);
        CHECK(s.A.bottomLeftCorner(2, 2).norm() == 0.0);
        CHECK(s.C.leftCols(2) == plant.C.realization());
        CHECK(s.C.rightCols(2).norm() == 0.0);
        CHECK(s.D == plant.D);
    }
    SUBCASE("reference controller") {
        const AugmentedSystem s = augment(plant, squeezer_controller(4, 4, -1));
        CHECK(s.A.rows() == 4);
        CHECK(s.B.rows() == 4);
        CHECK(s.B.cols() == 2);
        CHECK(s.A.bottomLeftCorner(2, 2) == -4.0 * identity(2));
        CHECK(s.L.cols() == 4);
        CHECK(s.L.rightCols(2).norm() == 0.0);
        CHECK(has_doubled_structure(s.A.topLeftCorner(2, 2)));
    }
    SUBCASE("wrong topology") {
        CHECK_THROWS_AS(augment(plant, feedback_squeezer_controller(4, 2, 2, 0.5)), Error);
        const QuantumPlant fb = feedback_squeezer_plant(4, 2, 2, -1.0, estimand());
        CHECK_THROWS_AS(augment(fb, squeezer_controller(4, 4, -1)), Error);
    }
}

TEST_CASE("augment_feedback") {
    const QuantumPlant plant = feedback_squeezer_plant(4, 2, 2, -1.0, estimand());

    SUBCASE("feedback blocks") {
        const AugmentedSystem s = augment_feedback(plant, feedback_squeezer_controller(4, 2, 2, 0.5));
        CHECK((s.A.topLeftCorner(2, 2) - (plant.A.realization() - 2.0 * identity(2))).norm() < 1e-14);
        CHECK((s.B.block(2, 0, 2, 2) + kSqrt2 * identity(2)).norm() < 1e-15);
        CHECK(s.B.cols() == 4);
        CHECK(s.D.cols() == 4);
        CHECK(s.topology == Topology::feedback);
    }
    SUBCASE("severed feedback") {
        CoherentController c = feedback_squeezer_controller(4, 2, 2, 0.5);
        c.d_fb_in = CMatrix::Zero(2, 2);
        c.c_fb    = CMatrix::Zero(2, 2);
        c.b_in    = CMatrix::Zero(2, 2);
        const AugmentedSystem s = augment_feedback(plant, c);
        CHECK(s.A.topRightCorner(2, 2).norm() == 0.0);
        CHECK(s.A.bottomLeftCorner(2, 2).norm() == 0.0);
        CHECK(s.A.topLeftCorner(2, 2) == plant.A.realization());
    }
    SUBCASE("wrong topology") {
        CHECK_THROWS_AS(augment_feedback(plant, squeezer_controller(4, 4, -1)), Error);
    }
}

TEST_CASE("lift_uncertainty") {
    const UncertaintyModel u = squeezer_uncertainty(2.0, 0.1);
    const QuantumPlant plant  = squeezer_plant(4, 4, 0.5, estimand());

    SUBCASE("zero couplings") {
        CoherentController c = pass_through(1);
        c.d_out              = CMatrix::Zero(2, 2);
        const AugmentedUncertainty au = lift_uncertainty(u, plant, c, Topology::no_feedback);
        CHECK(au.H1.topRows(2) == u.H1);
        CHECK(au.H1.bottomRows(2).norm() == 0.0);
        CHECK(au.H3.norm() == 0.0);
    }
    SUBCASE("lower block") {
        const CoherentController c = squeezer_controller(4, 4, -1);
        const AugmentedUncertainty au = lift_uncertainty(u, plant, c, Topology::no_feedback);
        const CMatrix lower = c.b_in * u.H3;
        CHECK((au.H1.bottomRows(2) - lower).norm() == 0.0);
        CHECK(au.H1(2, 0).real() == doctest::Approx(0.8));
        CHECK(au.H1(3, 1).real() == doctest::Approx(0.8));
    }
}

TEST_CASE("lifted uncertainty consistency, no feedback") {
    const UncertaintyModel   u     = squeezer_uncertainty(2.0, 0.1);
    const QuantumPlant       plant = squeezer_plant(4, 4, 0.5, estimand());
    const CoherentController c     = squeezer_controller(4, 4, -1);
    const AugmentedSystem    aug   = augment(plant, c);
    const AugmentedUncertainty au  = lift_uncertainty(u, plant, c, Topology::no_feedback);

    for (double delta : kDeltas) {
        const DeltaTriple d = evaluate_deltas(u, delta);
        const DeltaTriple l = evaluate_deltas(au, delta);

        // perturbed plant pushed through the augmentation formulas
        CMatrix aa = aug.A;
        aa.topLeftCorner(2, 2) += d.dA;
        aa.bottomLeftCorner(2, 2) += c.b_in * d.dC;
        CMatrix ba = aug.B;
        ba.topRows(2) += d.dB;
        CMatrix ca = aug.C;
        ca.leftCols(2) += c.d_out * d.dC;

        CHECK((aug.A + l.dA - aa).norm() <= 1e-12);
        CHECK((aug.B + l.dB - ba).norm() <= 1e-12);
        CHECK((aug.C + l.dC - ca).norm() <= 1e-12);
    }
}

TEST_CASE("lifted uncertainty consistency, feedback") {
    const UncertaintyModel   u     = squeezer_uncertainty(kSqrt2, 0.1);
    const QuantumPlant       plant = feedback_squeezer_plant(4, 2, 2, -1.0, estimand());
    const CoherentController c     = feedback_squeezer_controller(4, 2, 2, 0.5);
    const AugmentedSystem    aug   = augment_feedback(plant, c);
    const AugmentedUncertainty au  = lift_uncertainty(u, plant, c, Topology::feedback);

    for (double delta : kDeltas) {
        const DeltaTriple d = evaluate_deltas(u, delta);
        const DeltaTriple l = evaluate_deltas(au, delta);

        // rebuild the augmented system from the perturbed plant
        QuantumPlant pert = plant;
        pert.A      = DoubledOperator::from_realization(plant.A.realization() + d.dA);
        pert.B_dist = plant.B_dist + d.dB;
        pert.C      = DoubledOperator::from_realization(plant.C.realization() + d.dC);
        const AugmentedSystem ref = augment_feedback(pert, c);

        CHECK((aug.A + l.dA - ref.A).norm() <= 1e-12);
        CHECK((aug.B + l.dB - ref.B).norm() <= 1e-12);
        CHECK((aug.C + l.dC - ref.C).norm() <= 1e-12);
    }
}

TEST_CASE("augmentation preserves doubled structure") {
    auto blocks_doubled = [](const CMatrix& m, Index rb, Index cb) {
        bool ok = true;
        for (Index i = 0; i < m.rows(); i += rb)
            for (Index j = 0; j < m.cols(); j += cb) ok = ok && has_doubled_structure(m.block(i, j, rb, cb));
        return ok;
    };
    const AugmentedSystem a =
        augment(squeezer_plant(4, 4, 0.5, estimand()), squeezer_controller(2, 2, Complex(0.5, 0.5)));
    CHECK(blocks_doubled(a.A, 2, 2));
    CHECK(blocks_doubled(a.B, 2, 2));
    CHECK(blocks_doubled(a.C, 2, 2));
    const AugmentedSystem f = augment_feedback(feedback_squeezer_plant(4, 2, 2, -1.0, estimand()),
                                               feedback_squeezer_controller(4, 2, 2, Complex(0.5, -0.2)));
    CHECK(blocks_doubled(f.A, 2, 2));
    CHECK(blocks_doubled(f.B, 2, 2));
    CHECK(blocks_doubled(f.C, 2, 2));
    CHECK(blocks_doubled(f.D, 2, 2));
}

TEST_CASE("block identity between plant and augmented scaled problems") {
    const UncertaintyModel   u     = squeezer_uncertainty(2.0, 0.1);
    const QuantumPlant       plant = squeezer_plant(4, 4, 0.5, estimand());
    const CMatrix            S     = homodyne_matrix({{0.2}});
    for (const CoherentController& c : {squeezer_controller(4, 4, -1), squeezer_controller(2, 2, Complex(0.3, 0.4))}) {
        const ScaledProblem pp = assemble_classical(plant, u, S, 0.65, 0.19, 0.81);
        const ScaledProblem composed = compose_augmented_problem(pp, c, S);
        const ScaledProblem direct   = assemble_augmented(augment(plant, c),
                                                          lift_uncertainty(u, plant, c, Topology::no_feedback),
                                                          S, 0.65, 0.19, 0.81);
        CHECK((composed.A - direct.A).norm() <= 1e-12);
        CHECK((composed.B1 - direct.B1).norm() <= 1e-12);
        CHECK((composed.C1 - direct.C1).norm() <= 1e-12);
        CHECK((composed.C2 - direct.C2).norm() <= 1e-12);
        CHECK((composed.D12 - direct.D12).norm() <= 1e-12);
        CHECK((composed.D21 - direct.D21).norm() <= 1e-12);
        CHECK((composed.E2 - direct.E2).norm() <= 1e-12);
    }
}

} // TEST_SUITE
