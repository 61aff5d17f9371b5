#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "entsim/contract.hpp"

// Exact representation and manipulation of single-photon polarization
// vectors and two-photon polarization states.
//
// Conventions, frozen throughout the library:
//   - canonical single-photon basis is {|V>, |H>}, V first;
//   - circular states are |R> = (|V> + i|H>)/sqrt2, |L> = (|V> - i|H>)/sqrt2;
//   - two-photon components are ordered row-major A-then-B:
//     (e0_A e0_B, e0_A e1_B, e1_A e0_B, e1_A e1_B), index = 2*i + j.

namespace entsim {

using Amplitude = std::complex<double>;

// Construction-time invariants (norms, orthogonality, unitarity).
inline constexpr double kConstructTol = 1e-12;

enum class Arm { A, B };

inline std::string arm_name(Arm arm) { return arm == Arm::A ? "A" : "B"; }

inline bool is_finite(Amplitude a) {
    return std::isfinite(a.real()) && std::isfinite(a.imag());
}

// Single-photon polarization state: coordinates in the canonical {|V>,|H>}
// basis, unit norm.
class PolVector {
  public:
    PolVector(Amplitude c_v, Amplitude c_h) : v_(c_v), h_(c_h) {
        require(is_finite(v_) && is_finite(h_), "PolVector: non-finite amplitude");
        require(std::abs(std::norm(v_) + std::norm(h_) - 1.0) <= kConstructTol,
                "PolVector: |cV|^2 + |cH|^2 != 1");
    }

    Amplitude v() const { return v_; }
    Amplitude h() const { return h_; }

  private:
    Amplitude v_, h_;
};

inline Amplitude inner(const PolVector& a, const PolVector& b) {
    return std::conj(a.v()) * b.v() + std::conj(a.h()) * b.h();
}

// |<a|b>| >= 1 - tol, i.e. the two vectors describe the same ray.
inline bool equal_up_to_global_phase(const PolVector& a, const PolVector& b, double tol) {
    return std::abs(inner(a, b)) >= 1.0 - tol;
}

// An orthonormal pair of single-photon polarization vectors with a fixed
// phase convention, plus short display labels ("V"/"H", "R"/"L", ...).
class PolarizationBasis {
  public:
    PolarizationBasis(PolVector e0, PolVector e1, std::string label0, std::string label1)
        : e0_(e0), e1_(e1), label0_(std::move(label0)), label1_(std::move(label1)) {
        require(std::abs(inner(e0_, e1_)) <= kConstructTol,
                "PolarizationBasis: vectors not orthogonal");
    }

    const PolVector& e0() const { return e0_; }
    const PolVector& e1() const { return e1_; }
    const PolVector& vector(int outcome) const { return outcome == 0 ? e0_ : e1_; }
    const std::string& label0() const { return label0_; }
    const std::string& label1() const { return label1_; }
    // Combined display label, e.g. "R/L".
    std::string label() const { return label0_ + "/" + label1_; }

  private:
    PolVector e0_, e1_;
    std::string label0_, label1_;
};

inline const PolarizationBasis& canonical_basis() {
    static const PolarizationBasis basis{
        PolVector{1.0, 0.0}, PolVector{0.0, 1.0}, "V", "H"};
    return basis;
}

// True when the bases agree as ordered, phase-fixed vector pairs (labels are
// display metadata and do not participate).
inline bool same_basis(const PolarizationBasis& a, const PolarizationBasis& b,
                       double tol = kConstructTol) {
    const auto close = [tol](const PolVector& x, const PolVector& y) {
        return std::abs(x.v() - y.v()) <= tol && std::abs(x.h() - y.h()) <= tol;
    };
    return close(a.e0(), b.e0()) && close(a.e1(), b.e1());
}

// A 2x2 unitary acting on one arm; matrix in the canonical {|V>,|H>} basis,
// row-major.
class LocalOperator {
  public:
    LocalOperator(Amplitude m00, Amplitude m01, Amplitude m10, Amplitude m11, Arm arm)
        : m_{m00, m01, m10, m11}, arm_(arm) {
        for (const auto& entry : m_)
            require(is_finite(entry), "LocalOperator: non-finite entry");
        // M^dag M = I, entrywise.
        const Amplitude d00 = std::conj(m00) * m00 + std::conj(m10) * m10;
        const Amplitude d01 = std::conj(m00) * m01 + std::conj(m10) * m11;
        const Amplitude d11 = std::conj(m01) * m01 + std::conj(m11) * m11;
        require(std::abs(d00 - 1.0) <= kConstructTol && std::abs(d11 - 1.0) <= kConstructTol &&
                    std::abs(d01) <= kConstructTol,
                "LocalOperator: matrix is not unitary");
    }

    Amplitude m00() const { return m_[0]; }
    Amplitude m01() const { return m_[1]; }
    Amplitude m10() const { return m_[2]; }
    Amplitude m11() const { return m_[3]; }
    Arm arm() const { return arm_; }

    PolVector apply(const PolVector& p) const {
        return {m_[0] * p.v() + m_[1] * p.h(), m_[2] * p.v() + m_[3] * p.h()};
    }

    LocalOperator on_arm(Arm arm) const { return {m_[0], m_[1], m_[2], m_[3], arm}; }

    LocalOperator adjoint() const {
        return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3]), arm_};
    }

    static LocalOperator identity(Arm arm) { return {1.0, 0.0, 0.0, 1.0, arm}; }

  private:
    std::array<Amplitude, 4> m_;
    Arm arm_;
};

// op2 * op1 (op1 applied first). Both operators must act on the same arm.
inline LocalOperator compose(const LocalOperator& op1, const LocalOperator& op2) {
    require(op1.arm() == op2.arm(), "compose: operators act on different arms");
    return {op2.m00() * op1.m00() + op2.m01() * op1.m10(),
            op2.m00() * op1.m01() + op2.m01() * op1.m11(),
            op2.m10() * op1.m00() + op2.m11() * op1.m10(),
            op2.m10() * op1.m01() + op2.m11() * op1.m11(), op1.arm()};
}

// Two-photon polarization state. The physical state is stored once, as the
// canonical {V,H}x{V,H} amplitude quadruple; the display bases are metadata,
// and amps() re-derives coordinates in them on demand. A basis change
// therefore never touches the stored amplitudes.
class TwoPhotonState {
  public:
    // amps are coordinates in basis_a (x) basis_b, spec ordering.
    TwoPhotonState(const std::array<Amplitude, 4>& amps, PolarizationBasis basis_a,
                   PolarizationBasis basis_b)
        : c_{}, basis_a_(std::move(basis_a)), basis_b_(std::move(basis_b)) {
        validate_quadruple(amps, "TwoPhotonState");
        // Re-express in the canonical frame: c_ab = sum_ij amps_ij (eA_i)_a (eB_j)_b.
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const PolVector& ea = basis_a_.vector(i);
                const PolVector& eb = basis_b_.vector(j);
                const Amplitude w = amps[2 * i + j];
                c_[0] += w * ea.v() * eb.v();
                c_[1] += w * ea.v() * eb.h();
                c_[2] += w * ea.h() * eb.v();
                c_[3] += w * ea.h() * eb.h();
            }
        }
    }

    // amps given directly in the canonical frame, displayed in the given bases.
    static TwoPhotonState from_canonical(const std::array<Amplitude, 4>& canonical,
                                         PolarizationBasis basis_a, PolarizationBasis basis_b) {
        validate_quadruple(canonical, "TwoPhotonState");
        return TwoPhotonState{canonical, std::move(basis_a), std::move(basis_b), CanonicalTag{}};
    }

    const PolarizationBasis& basis_a() const { return basis_a_; }
    const PolarizationBasis& basis_b() const { return basis_b_; }
    const std::array<Amplitude, 4>& canonical_amps() const { return c_; }

    // Coordinate <ea (x) eb | psi>.
    Amplitude project(const PolVector& ea, const PolVector& eb) const {
        return std::conj(ea.v()) * (std::conj(eb.v()) * c_[0] + std::conj(eb.h()) * c_[1]) +
               std::conj(ea.h()) * (std::conj(eb.v()) * c_[2] + std::conj(eb.h()) * c_[3]);
    }

    // Coordinates in the display bases, spec ordering.
    std::array<Amplitude, 4> amps() const {
        std::array<Amplitude, 4> out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out[2 * i + j] = project(basis_a_.vector(i), basis_b_.vector(j));
        return out;
    }

  private:
    struct CanonicalTag {};
    TwoPhotonState(const std::array<Amplitude, 4>& canonical, PolarizationBasis basis_a,
                   PolarizationBasis basis_b, CanonicalTag)
        : c_(canonical), basis_a_(std::move(basis_a)), basis_b_(std::move(basis_b)) {}

    static void validate_quadruple(const std::array<Amplitude, 4>& amps, const char* who) {
        double norm2 = 0.0;
        for (const auto& a : amps) {
            require(is_finite(a), std::string(who) + ": non-finite amplitude");
            norm2 += std::norm(a);
        }
        require(std::abs(norm2 - 1.0) <= kConstructTol,
                std::string(who) + ": amplitudes not normalized");
    }

    std::array<Amplitude, 4> c_;  // canonical {V,H}x{V,H} frame
    PolarizationBasis basis_a_, basis_b_;
};

// (|V>_A |H>_B - |H>_A |V>_B) / sqrt2 in the canonical bases.
inline TwoPhotonState make_singlet() {
    const double s = 1.0 / std::numbers::sqrt2;
    return TwoPhotonState::from_canonical({Amplitude{0.0}, Amplitude{s}, Amplitude{-s}, Amplitude{0.0}},
                                          canonical_basis(), canonical_basis());
}

// Re-express the same physical state in new display bases. All Born
// probabilities are untouched; only the coordinates reported by amps() change.
inline TwoPhotonState change_basis(const TwoPhotonState& s, const PolarizationBasis& new_a,
                                   const PolarizationBasis& new_b) {
    return TwoPhotonState::from_canonical(s.canonical_amps(), new_a, new_b);
}

// (M (x) I)|s> or (I (x) M)|s> per op.arm(), computed in the canonical frame;
// display bases carry over.
inline TwoPhotonState apply_local(const TwoPhotonState& s, const LocalOperator& op) {
    const auto& c = s.canonical_amps();
    std::array<Amplitude, 4> out;
    if (op.arm() == Arm::A) {
        out[0] = op.m00() * c[0] + op.m01() * c[2];
        out[1] = op.m00() * c[1] + op.m01() * c[3];
        out[2] = op.m10() * c[0] + op.m11() * c[2];
        out[3] = op.m10() * c[1] + op.m11() * c[3];
    } else {
        out[0] = op.m00() * c[0] + op.m01() * c[1];
        out[1] = op.m10() * c[0] + op.m11() * c[1];
        out[2] = op.m00() * c[2] + op.m01() * c[3];
        out[3] = op.m10() * c[2] + op.m11() * c[3];
    }
    return TwoPhotonState::from_canonical(out, s.basis_a(), s.basis_b());
}

// True iff |<a|b>| >= 1 - tol. Both states must be displayed in the same
// bases (convert first); global phase is unobservable, so this is the
// physically meaningful notion of state equality.
inline bool equal_up_to_global_phase(const TwoPhotonState& a, const TwoPhotonState& b,
                                     double tol) {
    require(same_basis(a.basis_a(), b.basis_a()) && same_basis(a.basis_b(), b.basis_b()),
            "equal_up_to_global_phase: states are expressed in different bases");
    Amplitude overlap{0.0};
    for (int k = 0; k < 4; ++k)
        overlap += std::conj(a.canonical_amps()[k]) * b.canonical_amps()[k];
    return std::abs(overlap) >= 1.0 - tol;
}

}  // namespace entsim
