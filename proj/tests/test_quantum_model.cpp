#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "qre/quantum_model.hpp"

using namespace qre;

namespace {

const Complex I1{0.0, 1.0};
const double  kSqrt2 = std::sqrt(2.0);

CMatrix scalar(Complex v) { return CMatrix::Constant(1, 1, v); }

CMatrix row(double a, double b) {
    CMatrix l(1, 2);
    l << a, b;
    return l;
}

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::ConfigError;
}

} // namespace

TEST_SUITE("quantum-model") {

TEST_CASE("omega blocks") {
    CHECK(omega(scalar(1.0), scalar(0.0)).realization() == identity(2));

    CMatrix swap(2, 2);
    swap << 0, 1, 1, 0;
    CHECK(omega(scalar(0.0), scalar(1.0)).realization() == swap);

    CMatrix sqz(2, 2);
    sqz << -2, -0.5, -0.5, -2;
    CHECK(omega(scalar(-2.0), scalar(-0.5)).realization() == sqz);

    const DoubledOperator c = omega(scalar({1, 2}), scalar({0, 3}));
    CHECK(c.realization()(1, 0) == Complex(0, -3));
    CHECK(c.realization()(1, 1) == Complex(1, -2));

    CHECK_THROWS_AS(omega(CMatrix::Zero(1, 2), CMatrix::Zero(2, 1)), Error);
}

TEST_CASE("from_realization") {
    CMatrix m(2, 2);
    m << Complex(1, 1), Complex(0, 2), Complex(0, -2), Complex(1, -1);
    const DoubledOperator d = DoubledOperator::from_realization(m);
    CHECK(d.m1()(0, 0) == Complex(1, 1));
    CHECK(d.m2()(0, 0) == Complex(0, 2));

    m(1, 0) = Complex(0, 2);
    CHECK_FALSE(has_doubled_structure(m));
    CHECK(code_of([&] { (void)DoubledOperator::from_realization(m); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("doubled operators are closed under + and *") {
    std::mt19937 rng(50);
    for (int k = 0; k < 50; ++k) {
        const auto a = omega(oracle::random_matrix(rng, 2, 3), oracle::random_matrix(rng, 2, 3));
        const auto b = omega(oracle::random_matrix(rng, 3, 2), oracle::random_matrix(rng, 3, 2));
        const auto c = omega(oracle::random_matrix(rng, 2, 3), oracle::random_matrix(rng, 2, 3));

        const CMatrix prod = a.realization() * b.realization();
        CHECK(has_doubled_structure(prod));
        CHECK(((a * b).realization() - prod).norm() <= 1e-12 * (1.0 + prod.norm()));

        const CMatrix sum = a.realization() + c.realization();
        CHECK(has_doubled_structure(sum));
        CHECK(((a + c).realization() - sum).norm() == 0.0);
        CHECK(((2.5 * a).realization() - 2.5 * a.realization()).norm() == 0.0);
    }
}

TEST_CASE("homodyne_matrix") {
    const double r = 1.0 / kSqrt2;
    CMatrix s0 = homodyne_matrix({{0.0}});
    CHECK(std::abs(s0(0, 0) - r) < 1e-15);
    CHECK(std::abs(s0(0, 1) - r) < 1e-15);

    CMatrix s90 = homodyne_matrix({{std::numbers::pi / 2}});
    CHECK(std::abs(s90(0, 0) + I1 * r) < 1e-15);
    CHECK(std::abs(s90(0, 1) - I1 * r) < 1e-15);

    const double th  = 10.0 * std::numbers::pi / 180.0;
    CMatrix      s10 = homodyne_matrix({{th}});
    CHECK(std::abs(s10(0, 0) - Complex(0.98481, -0.17365) / kSqrt2) < 1e-5);
    CHECK(std::abs(s10(0, 1) - Complex(0.98481, 0.17365) / kSqrt2) < 1e-5);
    CHECK(std::abs((s10 * s10.adjoint())(0, 0) - 1.0) < 1e-15);

    SUBCASE("rows orthonormal for random angle lists") {
        std::mt19937 rng(4);
        std::uniform_real_distribution<double> ang(-10.0, 10.0);
        std::uniform_int_distribution<int>     len(1, 5);
        for (int k = 0; k < 100; ++k) {
            HomodyneConfig cfg;
            for (int i = len(rng); i > 0; --i) cfg.angles.push_back(ang(rng));
            const CMatrix s = homodyne_matrix(cfg);
            const auto    m = static_cast<Index>(cfg.angles.size());
            CHECK(s.rows() == m);
            CHECK(s.cols() == 2 * m);
            CHECK((s * s.adjoint() - identity(m)).norm() <= 1e-14);
        }
    }
}

TEST_CASE("squeezer_plant") {
    const QuantumPlant p = squeezer_plant(4, 4, 0.5, row(0.1, -0.1));
    CMatrix a(2, 2);
    a << -2, -0.5, -0.5, -2;
    CHECK(p.A.realization() == a);
    CHECK(p.B_dist == -2.0 * identity(2));
    CHECK(p.C.realization() == 2.0 * identity(2));
    CHECK(p.D == identity(2));
    CHECK(p.physically_realizable);
    CHECK_FALSE(p.has_control_input());
    CHECK(p.C.realization() * p.B_dist == -4.0 * identity(2));

    CHECK(code_of([] { (void)squeezer_plant(4, 2, 0.5, row(0.1, -0.1)); }) == ErrorCode::NotPhysicallyRealizable);
    const QuantumPlant loose = squeezer_plant(4, 2, 0.5, row(0.1, -0.1), Realizability::permissive);
    CHECK_FALSE(loose.physically_realizable);

    const QuantumPlant diag = squeezer_plant(2, 2, 0.0, row(1, 0));
    CHECK(diag.A.realization() == -identity(2));
    CHECK((diag.B_dist + kSqrt2 * identity(2)).norm() < 1e-15);
    CHECK((diag.C.realization() - kSqrt2 * identity(2)).norm() < 1e-15);

    CHECK(code_of([] { (void)squeezer_plant(-1, 1, 0.0, row(1, 0), Realizability::permissive); }) ==
          ErrorCode::DomainError);
}

TEST_CASE("realizability tolerance") {
    CHECK_NOTHROW((void)squeezer_plant(4.0 + 1e-12, 4.0, 0.0, row(1, 0)));
    CHECK_THROWS((void)squeezer_plant(4.0 + 1e-9, 4.0, 0.0, row(1, 0)));
}

TEST_CASE("squeezer_controller") {
    const CoherentController c = squeezer_controller(4, 4, -1);
    CMatrix a(2, 2);
    a << -2, 1, 1, -2;
    CHECK(c.A.realization() == a);
    CHECK(c.b_in == -2.0 * identity(2));
    CHECK(c.c_out == 2.0 * identity(2));
    CHECK(c.d_out == identity(2));
    CHECK_FALSE(c.feedback_capable);

    CHECK(code_of([] { (void)squeezer_controller(4, 2, -1); }) == ErrorCode::NotPhysicallyRealizable);

    const CoherentController z = squeezer_controller(2, 2, Complex(0.5, 0.5));
    CHECK(z.A.realization()(0, 0) == Complex(-1.0));
    CHECK(z.A.realization()(0, 1) == Complex(-0.5, -0.5));
    CHECK(z.A.realization()(1, 0) == Complex(-0.5, 0.5));
    CHECK(z.A.realization()(1, 1) == Complex(-1.0));
}

TEST_CASE("feedback_squeezer_plant") {
    const QuantumPlant p = feedback_squeezer_plant(4, 2, 2, -1.0, row(0.1, -0.1));
    CMatrix a(2, 2);
    a << -2, 1, 1, -2;
    CHECK(p.A.realization() == a);
    CHECK((p.B_dist + kSqrt2 * identity(2)).norm() < 1e-15);
    CHECK((p.B_ctrl + kSqrt2 * identity(2)).norm() < 1e-15);
    CHECK((p.C.realization() - kSqrt2 * identity(2)).norm() < 1e-15);
    CHECK(p.D_full().leftCols(2) == identity(2));
    CHECK(p.D_full().rightCols(2) == CMatrix::Zero(2, 2));
    CHECK(p.physically_realizable);

    CHECK(code_of([] { (void)feedback_squeezer_plant(4, 3, 2, -1.0, row(0.1, -0.1)); }) ==
          ErrorCode::NotPhysicallyRealizable);

    const QuantumPlant single = feedback_squeezer_plant(2, 2, 0, 0.0, row(1, 0));
    CHECK(single.B_ctrl == CMatrix::Zero(2, 2));
    CHECK(single.A.realization() == -identity(2));
}

TEST_CASE("feedback_squeezer_controller") {
    const CoherentController c = feedback_squeezer_controller(4, 2, 2, 0.5);
    CMatrix a(2, 2);
    a << -2, -0.5, -0.5, -2;
    CHECK(c.A.realization() == a);
    CHECK(c.feedback_capable);
    for (const CMatrix* m : {&c.b_in, &c.b_aux}) CHECK((*m + kSqrt2 * identity(2)).norm() < 1e-15);
    for (const CMatrix* m : {&c.c_out, &c.c_fb}) CHECK((*m - kSqrt2 * identity(2)).norm() < 1e-15);
    // Y~ = sqrt(kc1) a_c + A~ and U = sqrt(kc2) a_c + Y
    CHECK(c.d_out_aux == identity(2));
    CHECK(c.d_out == CMatrix::Zero(2, 2));
    CHECK(c.d_fb_aux == CMatrix::Zero(2, 2));
    CHECK(c.d_fb_in == identity(2));

    CHECK(code_of([] { (void)feedback_squeezer_controller(4, 1, 2, 0.5); }) ==
          ErrorCode::NotPhysicallyRealizable);

    const CoherentController d = feedback_squeezer_controller(2, 1, 1, 0.0);
    CHECK(d.A.realization() == -identity(2));
}

} // TEST_SUITE
