#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "entsim/optics.hpp"
#include "entsim/qstate.hpp"
#include "test_support.hpp"

using namespace entsim;
using test_support::close;
using test_support::close_quad;

namespace {

constexpr double kS2 = 0.7071067811865475244;  // 1/sqrt(2)
const Amplitude kI{0.0, 1.0};

// Independent oracle: dense 4x4 Kronecker product applied to the amplitude
// vector, built by a code path that shares nothing with apply_local.
std::array<Amplitude, 4> kron_apply(const LocalOperator& op, const std::array<Amplitude, 4>& c) {
    const std::array<std::array<Amplitude, 2>, 2> m{{{op.m00(), op.m01()}, {op.m10(), op.m11()}}};
    const std::array<std::array<Amplitude, 2>, 2> eye{{{1.0, 0.0}, {0.0, 1.0}}};
    const auto& left = op.arm() == Arm::A ? m : eye;
    const auto& right = op.arm() == Arm::A ? eye : m;
    std::array<std::array<Amplitude, 4>, 4> big{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    big[2 * i + k][2 * j + l] = left[i][j] * right[k][l];
    std::array<Amplitude, 4> out{};
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) out[r] += big[r][s] * c[s];
    return out;
}

}  // namespace

TEST_CASE("singlet amplitudes match the defining quadruple", "[qstate]") {
    const TwoPhotonState psi = make_singlet();
    CHECK(close_quad(psi.amps(), {Amplitude{0.0}, Amplitude{kS2}, Amplitude{-kS2}, Amplitude{0.0}}));
    double norm2 = 0.0;
    for (const auto& a : psi.amps()) norm2 += std::norm(a);
    CHECK(close(norm2, 1.0));
}

TEST_CASE("basis change to circular reproduces the circular-basis singlet up to a phase",
          "[qstate]") {
    const TwoPhotonState in_circ = change_basis(make_singlet(), circular_basis(), circular_basis());
    // Exact coordinates carry the global phase i relative to the textbook form.
    CHECK(close_quad(in_circ.amps(), {Amplitude{0.0}, kI * kS2, -kI * kS2, Amplitude{0.0}}));
    const TwoPhotonState textbook{{Amplitude{0.0}, Amplitude{kS2}, Amplitude{-kS2}, Amplitude{0.0}},
                                  circular_basis(), circular_basis()};
    CHECK(equal_up_to_global_phase(in_circ, textbook, 1e-12));
    CHECK_FALSE(close_quad(in_circ.amps(), textbook.amps()));  // the phase is really there
}

TEST_CASE("identity basis change leaves coordinates untouched", "[qstate]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = test_support::random_state(seed);
        const auto t = change_basis(s, s.basis_a(), s.basis_b());
        CHECK(close_quad(s.amps(), t.amps()));
    }
}

TEST_CASE("round trip through the circular basis restores coordinates", "[qstate]") {
    const TwoPhotonState psi_rot = apply_local(make_singlet(), paper_qwp(Arm::A));
    const auto round_trip =
        change_basis(change_basis(psi_rot, circular_basis(), circular_basis()),
                     canonical_basis(), canonical_basis());
    CHECK(close_quad(psi_rot.amps(), round_trip.amps()));
}

TEST_CASE("waveplate output in the circular basis has all four combinations", "[qstate]") {
    const TwoPhotonState psi_rot = apply_local(make_singlet(), paper_qwp(Arm::A));
    const auto circ = change_basis(psi_rot, circular_basis(), circular_basis());
    CHECK(close_quad(circ.amps(), {-kI * 0.5, kI * 0.5, Amplitude{-0.5}, Amplitude{-0.5}}));
}

TEST_CASE("waveplate output in mixed bases keeps the anticorrelated form", "[qstate]") {
    const TwoPhotonState psi_rot = apply_local(make_singlet(), paper_qwp(Arm::A));
    const auto mixed = change_basis(psi_rot, circular_basis(), canonical_basis());
    // (RV, RH, LV, LH) = (0, 1/sqrt2, -1/sqrt2, 0): R pairs with H, L with V.
    CHECK(close_quad(mixed.amps(),
                     {Amplitude{0.0}, Amplitude{kS2}, Amplitude{-kS2}, Amplitude{0.0}}));
}

TEST_CASE("waveplate output in the linear basis follows the hand expansion", "[qstate]") {
    const TwoPhotonState psi_rot = apply_local(make_singlet(), paper_qwp(Arm::A));
    // (1/2)(-|VV> + |VH> + i|HV> + i|HH>); the HH coefficient is +i/2, which
    // is what the intermediate expansion gives and what consistency with the
    // circular-basis quadruple requires.
    CHECK(close_quad(psi_rot.amps(), {Amplitude{-0.5}, Amplitude{0.5}, kI * 0.5, kI * 0.5}));
}

TEST_CASE("identity operator is a no-op", "[qstate]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = test_support::random_state(seed);
        CHECK(close_quad(s.amps(), apply_local(s, LocalOperator::identity(Arm::A)).amps()));
        CHECK(close_quad(s.amps(), apply_local(s, LocalOperator::identity(Arm::B)).amps()));
    }
}

TEST_CASE("apply_local agrees with a dense Kronecker-product oracle", "[qstate]") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = test_support::random_state(seed);
        const Arm arm = seed % 2 == 0 ? Arm::A : Arm::B;
        const LocalOperator op = random_local_unitary(seed + 1000, arm);
        const auto expected = kron_apply(op, s.canonical_amps());
        const auto actual = apply_local(s, op).canonical_amps();
        for (int k = 0; k < 4; ++k) CHECK(close(actual[k], expected[k], 1e-12));
    }
}

TEST_CASE("normalization survives random operation sequences", "[qstate]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        TwoPhotonState s = test_support::random_state(seed);
        for (int step = 0; step < 30; ++step) {
            const std::uint64_t k = seed * 100 + step;
            if (step % 3 == 2) {
                s = change_basis(s, test_support::random_basis(k), test_support::random_basis(~k));
            } else {
                s = apply_local(s, random_local_unitary(k, step % 2 ? Arm::A : Arm::B));
            }
        }
        double norm2 = 0.0;
        for (const auto& a : s.amps()) norm2 += std::norm(a);
        CHECK(close(norm2, 1.0, 1e-9));
    }
}

TEST_CASE("born probabilities are invariant under basis changes", "[qstate]") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto s = test_support::random_state(seed);
        const auto moved = change_basis(s, test_support::random_basis(seed + 1),
                                        test_support::random_basis(seed + 2));
        const auto analyzer_a = test_support::random_basis(seed + 3);
        const auto analyzer_b = test_support::random_basis(seed + 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double before =
                    std::norm(s.project(analyzer_a.vector(i), analyzer_b.vector(j)));
                const double after =
                    std::norm(moved.project(analyzer_a.vector(i), analyzer_b.vector(j)));
                CHECK(close(before, after, 1e-9));
            }
    }
}

TEST_CASE("global-phase equality", "[qstate]") {
    const TwoPhotonState psi = make_singlet();
    const TwoPhotonState phased = TwoPhotonState::from_canonical(
        {kI * psi.canonical_amps()[0], kI * psi.canonical_amps()[1], kI * psi.canonical_amps()[2],
         kI * psi.canonical_amps()[3]},
        canonical_basis(), canonical_basis());
    CHECK(equal_up_to_global_phase(psi, phased, 1e-12));
    CHECK(equal_up_to_global_phase(psi, psi, 1e-12));

    const TwoPhotonState psi_rot = apply_local(psi, paper_qwp(Arm::A));
    CHECK_FALSE(equal_up_to_global_phase(psi, psi_rot, 1e-12));
    // |<psi|psi_rot>| = 1/2, well clear of the threshold even at loose tol.
    CHECK_FALSE(equal_up_to_global_phase(psi, psi_rot, 0.4));

    const TwoPhotonState in_circ = change_basis(psi, circular_basis(), circular_basis());
    CHECK_THROWS_AS(equal_up_to_global_phase(psi, in_circ, 1e-12), ContractViolation);
}

TEST_CASE("compose multiplies in application order", "[qstate]") {
    const LocalOperator qwp = paper_qwp(Arm::A);

    const LocalOperator round = compose(qwp, qwp.adjoint());
    CHECK(close(round.m00(), Amplitude{1.0}));
    CHECK(close(round.m01(), Amplitude{0.0}));
    CHECK(close(round.m10(), Amplitude{0.0}));
    CHECK(close(round.m11(), Amplitude{1.0}));

    const LocalOperator id_then_qwp = compose(LocalOperator::identity(Arm::A), qwp);
    CHECK(close(id_then_qwp.m00(), qwp.m00()));
    CHECK(close(id_then_qwp.m01(), qwp.m01()));
    CHECK(close(id_then_qwp.m10(), qwp.m10()));
    CHECK(close(id_then_qwp.m11(), qwp.m11()));

    // QWP twice sends |V> to (|R> + i|L>)/sqrt2.
    const LocalOperator twice = compose(qwp, qwp);
    const PolVector out = twice.apply(PolVector{1.0, 0.0});
    const PolVector r = circular_basis().e0();
    const PolVector l = circular_basis().e1();
    CHECK(close(out.v(), (r.v() + kI * l.v()) * kS2));
    CHECK(close(out.h(), (r.h() + kI * l.h()) * kS2));

    CHECK_THROWS_AS(compose(paper_qwp(Arm::A), paper_qwp(Arm::B)), ContractViolation);
}

TEST_CASE("unitarity is closed under composition", "[qstate]") {
    LocalOperator u = LocalOperator::identity(Arm::A);
    for (std::uint64_t seed = 0; seed < 50; ++seed) u = compose(u, random_local_unitary(seed));
    const Amplitude d00 = std::conj(u.m00()) * u.m00() + std::conj(u.m10()) * u.m10();
    const Amplitude d01 = std::conj(u.m00()) * u.m01() + std::conj(u.m10()) * u.m11();
    const Amplitude d11 = std::conj(u.m01()) * u.m01() + std::conj(u.m11()) * u.m11();
    CHECK(close(d00, Amplitude{1.0}, 1e-9));
    CHECK(close(d01, Amplitude{0.0}, 1e-9));
    CHECK(close(d11, Amplitude{1.0}, 1e-9));
}

TEST_CASE("construction contracts reject bad values", "[qstate]") {
    CHECK_THROWS_AS(PolVector(1.0, 1.0), ContractViolation);
    CHECK_THROWS_AS(PolVector(std::nan(""), 0.0), ContractViolation);
    CHECK_THROWS_AS(PolarizationBasis(PolVector{1.0, 0.0}, PolVector{kS2, kS2}, "a", "b"),
                    ContractViolation);
    CHECK_THROWS_AS(LocalOperator(1.0, 0.0, 0.0, 2.0, Arm::A), ContractViolation);
    CHECK_THROWS_AS(TwoPhotonState({Amplitude{1.0}, Amplitude{1.0}, Amplitude{0.0}, Amplitude{0.0}},
                                   canonical_basis(), canonical_basis()),
                    ContractViolation);
}
