#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "entsim/optics.hpp"
#include "test_support.hpp"

using namespace entsim;
using test_support::close;

namespace {
constexpr double kS2 = 0.7071067811865475244;
constexpr double kPi = std::numbers::pi;

bool vectors_close(const PolVector& a, const PolVector& b, double tol = 1e-12) {
    return close(a.v(), b.v(), tol) && close(a.h(), b.h(), tol);
}
}  // namespace

TEST_CASE("linear basis at 0 is the canonical basis", "[optics]") {
    const auto basis = linear_basis(0.0);
    CHECK(vectors_close(basis.e0(), canonical_basis().e0()));
    CHECK(vectors_close(basis.e1(), canonical_basis().e1()));
}

TEST_CASE("linear basis at a quarter turn swaps and flips", "[optics]") {
    const auto basis = linear_basis(kPi / 2.0);
    CHECK(close(basis.e0().v(), Amplitude{0.0}));
    CHECK(close(basis.e0().h(), Amplitude{1.0}));
    CHECK(close(basis.e1().v(), Amplitude{-1.0}));
    CHECK(close(basis.e1().h(), Amplitude{0.0}));
}

TEST_CASE("diagonal basis is orthonormal", "[optics]") {
    const auto basis = linear_basis(kPi / 4.0);
    CHECK(std::abs(inner(basis.e0(), basis.e1())) <= 1e-12);
    CHECK(close(std::abs(inner(basis.e0(), basis.e0())), 1.0));
}

TEST_CASE("theta plus quarter turn relates entrywise to theta", "[optics]") {
    for (int k = 0; k < 25; ++k) {
        const double theta = 0.13 + 0.12 * k;
        const auto at = linear_basis(theta);
        const auto shifted = linear_basis(theta + kPi / 2.0);
        CHECK(vectors_close(shifted.e0(), at.e1()));
        CHECK(close(shifted.e1().v(), -at.e0().v()));
        CHECK(close(shifted.e1().h(), -at.e0().h()));
    }
}

TEST_CASE("circular basis states carry the frozen phase convention", "[optics]") {
    const auto basis = circular_basis();
    CHECK(close(basis.e0().v(), Amplitude{kS2}));
    CHECK(close(basis.e0().h(), Amplitude{0.0, kS2}));
    CHECK(close(basis.e1().v(), Amplitude{kS2}));
    CHECK(close(basis.e1().h(), Amplitude{0.0, -kS2}));
    CHECK(std::abs(inner(basis.e0(), basis.e1())) <= 1e-12);
}

TEST_CASE("paper qwp maps V to R and H to L exactly", "[optics]") {
    const LocalOperator qwp = paper_qwp(Arm::A);
    CHECK(vectors_close(qwp.apply(PolVector{1.0, 0.0}), circular_basis().e0(), 0.0));
    CHECK(vectors_close(qwp.apply(PolVector{0.0, 1.0}), circular_basis().e1(), 0.0));

    const Amplitude d00 = std::conj(qwp.m00()) * qwp.m00() + std::conj(qwp.m10()) * qwp.m10();
    const Amplitude d01 = std::conj(qwp.m00()) * qwp.m01() + std::conj(qwp.m10()) * qwp.m11();
    const Amplitude d11 = std::conj(qwp.m01()) * qwp.m01() + std::conj(qwp.m11()) * qwp.m11();
    CHECK(close(d00, Amplitude{1.0}));
    CHECK(close(d01, Amplitude{0.0}));
    CHECK(close(d11, Amplitude{1.0}));
}

TEST_CASE("zero retardance is the identity", "[optics]") {
    for (double angle : {0.0, 0.3, 1.1, 2.9}) {
        const LocalOperator op = retarder(RetarderSpec{0.0, angle}, Arm::A);
        CHECK(close(op.m00(), Amplitude{1.0}));
        CHECK(close(op.m01(), Amplitude{0.0}));
        CHECK(close(op.m10(), Amplitude{0.0}));
        CHECK(close(op.m11(), Amplitude{1.0}));
    }
}

TEST_CASE("half-wave plate at vertical fast axis flips H", "[optics]") {
    const LocalOperator hwp = retarder(RetarderSpec{kPi, 0.0}, Arm::B);
    const PolVector v_out = hwp.apply(PolVector{1.0, 0.0});
    const PolVector h_out = hwp.apply(PolVector{0.0, 1.0});
    CHECK(close(v_out.v(), Amplitude{1.0}));
    CHECK(close(v_out.h(), Amplitude{0.0}));
    CHECK(close(h_out.v(), Amplitude{0.0}));
    CHECK(close(h_out.h(), Amplitude{-1.0}));
}

TEST_CASE("quarter-wave retarder at 135 degrees acts like the paper qwp on V and H",
          "[optics]") {
    // Numeric search over the fast-axis angle for the best simultaneous ray
    // match of V->R and H->L; the retarder family can only match the paper
    // operator ray-by-ray, never as a single matrix up to one global phase.
    double best_angle = 0.0, best_score = -1.0;
    for (int k = 0; k < 1800; ++k) {
        const double angle = kPi * k / 1800.0;
        const LocalOperator op = retarder(RetarderSpec{kPi / 2.0, angle}, Arm::A);
        const double score =
            std::min(std::abs(inner(circular_basis().e0(), op.apply(PolVector{1.0, 0.0}))),
                     std::abs(inner(circular_basis().e1(), op.apply(PolVector{0.0, 1.0}))));
        if (score > best_score) {
            best_score = score;
            best_angle = angle;
        }
    }
    CHECK(std::abs(best_angle - 3.0 * kPi / 4.0) <= kPi / 1800.0 + 1e-12);

    const LocalOperator op = retarder(RetarderSpec{kPi / 2.0, 3.0 * kPi / 4.0}, Arm::A);
    CHECK(equal_up_to_global_phase(op.apply(PolVector{1.0, 0.0}), circular_basis().e0(), 1e-12));
    CHECK(equal_up_to_global_phase(op.apply(PolVector{0.0, 1.0}), circular_basis().e1(), 1e-12));
}

TEST_CASE("retarder construction enforces parameter ranges", "[optics]") {
    CHECK_THROWS_AS(RetarderSpec(-0.1, 0.0), ContractViolation);
    CHECK_THROWS_AS(RetarderSpec(2.0 * kPi, 0.0), ContractViolation);
    CHECK_THROWS_AS(RetarderSpec(0.5, kPi), ContractViolation);
    CHECK_THROWS_AS(RetarderSpec(0.5, -0.1), ContractViolation);
    // In-range values construct unitary operators across the family.
    for (int d = 0; d < 12; ++d)
        for (int t = 0; t < 12; ++t)
            CHECK_NOTHROW(retarder(RetarderSpec{d * 0.5, t * 0.26}, Arm::A));
}

TEST_CASE("random local unitary is deterministic per seed", "[optics]") {
    const LocalOperator a = random_local_unitary(1234, Arm::A);
    const LocalOperator b = random_local_unitary(1234, Arm::A);
    CHECK(a.m00() == b.m00());
    CHECK(a.m01() == b.m01());
    CHECK(a.m10() == b.m10());
    CHECK(a.m11() == b.m11());
}

TEST_CASE("random local unitaries pass the Haar moment check", "[optics]") {
    double sum00 = 0.0, sum01 = 0.0;
    const int n = 1000;
    for (int k = 0; k < n; ++k) {
        const LocalOperator u = random_local_unitary(static_cast<std::uint64_t>(k));
        // Construction already enforces unitarity to 1e-12; accumulate the
        // first-row moments, which are Beta(1,1) for Haar U(2).
        sum00 += std::norm(u.m00());
        sum01 += std::norm(u.m01());
    }
    CHECK(std::abs(sum00 / n - 0.5) < 0.05);
    CHECK(std::abs(sum01 / n - 0.5) < 0.05);
}
