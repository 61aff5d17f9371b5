#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "entsim/qstate.hpp"
#include "entsim/rng.hpp"

// Constructors for physically meaningful bases and local operators: linear
// analyzer bases at arbitrary angle, the circular basis, the abstract
// quarter-wave plate |V> -> |R>, |H> -> |L>, general Jones retarders, and
// Haar-random unitaries.
//
// Angles are radians, measured from vertical, counterclockwise looking into
// the beam.

namespace entsim {

// One detection station: which arm it sits on and which orthonormal pair it
// distinguishes.
struct AnalyzerSetting {
    Arm arm;
    PolarizationBasis basis;
};

// A waveplate: phase retardance between the fast and slow axes, and the fast
// axis angle from vertical.
struct RetarderSpec {
    double retardance;        // radians, in [0, 2*pi)
    double fast_axis_angle;   // radians from vertical, in [0, pi)

    RetarderSpec(double retardance_rad, double fast_axis_angle_rad)
        : retardance(retardance_rad), fast_axis_angle(fast_axis_angle_rad) {
        require(std::isfinite(retardance) && retardance >= 0.0 &&
                    retardance < 2.0 * std::numbers::pi,
                "RetarderSpec: retardance outside [0, 2*pi)");
        require(std::isfinite(fast_axis_angle) && fast_axis_angle >= 0.0 &&
                    fast_axis_angle < std::numbers::pi,
                "RetarderSpec: fast axis angle outside [0, pi)");
    }
};

namespace detail {
inline std::string angle_label(double theta_rad, const char* mark) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", theta_rad * 180.0 / std::numbers::pi);
    return std::string(buf) + mark;
}
}  // namespace detail

// e0 = cos(theta)|V> + sin(theta)|H>, e1 = -sin(theta)|V> + cos(theta)|H>.
// Labels carry the angle in degrees, e.g. "22.5∥"/"22.5⊥".
inline PolarizationBasis linear_basis(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {PolVector{c, s}, PolVector{-s, c},
            detail::angle_label(theta, "∥"), detail::angle_label(theta, "⊥")};
}

// e0 = |R> = (|V> + i|H>)/sqrt2, e1 = |L> = (|V> - i|H>)/sqrt2. The sign
// convention is frozen; changing it would change every later table.
inline PolarizationBasis circular_basis() {
    const double s = 1.0 / std::numbers::sqrt2;
    return {PolVector{s, Amplitude{0.0, s}}, PolVector{s, Amplitude{0.0, -s}}, "R", "L"};
}

// The quarter-wave plate as the paper uses it: |V> -> |R> and |H> -> |L>
// exactly, i.e. the matrix whose columns are |R> and |L>. This is an
// abstract, frozen operator; see retarder() for the physical Jones family.
inline LocalOperator paper_qwp(Arm arm) {
    const double s = 1.0 / std::numbers::sqrt2;
    return {Amplitude{s}, Amplitude{s}, Amplitude{0.0, s}, Amplitude{0.0, -s}, arm};
}

// Jones matrix of a retarder: the fast axis f = cos(t)|V> + sin(t)|H> is left
// alone, the slow axis picks up exp(i*delta).
//
//   J = f f^T + exp(i*delta) s s^T
//
// Note this family never equals paper_qwp as a matrix (J is symmetric in the
// linear basis, paper_qwp is not); at retardance pi/2 with the fast axis at
// 3*pi/4 from vertical it maps |V> to the |R> ray and |H> to the |L> ray,
// each up to a per-state phase.
inline LocalOperator retarder(const RetarderSpec& spec, Arm arm) {
    const double c = std::cos(spec.fast_axis_angle);
    const double s = std::sin(spec.fast_axis_angle);
    const Amplitude phase = std::polar(1.0, spec.retardance);
    return {c * c + phase * s * s, c * s * (1.0 - phase),
            c * s * (1.0 - phase), s * s + phase * c * c, arm};
}

// Haar-distributed 2x2 unitary, deterministic per seed: complex Gaussian
// (Ginibre) columns orthonormalized by Gram-Schmidt. Gram-Schmidt yields a
// positive-real R diagonal, which is exactly the phase fix that makes the
// QR construction Haar.
inline LocalOperator random_local_unitary(std::uint64_t seed, Arm arm = Arm::A) {
    const RandomStream rs{seed, kStreamHaar};
    for (std::uint64_t attempt = 0;; ++attempt) {
        const auto g = [&](std::uint64_t slot) { return rs.gaussian(attempt, 2 * slot); };
        Amplitude z00{g(0), g(1)}, z10{g(2), g(3)}, z01{g(4), g(5)}, z11{g(6), g(7)};

        const double n1 = std::sqrt(std::norm(z00) + std::norm(z10));
        if (n1 < 1e-6) continue;
        const Amplitude q00 = z00 / n1, q10 = z10 / n1;

        const Amplitude r12 = std::conj(q00) * z01 + std::conj(q10) * z11;
        Amplitude w0 = z01 - r12 * q00, w1 = z11 - r12 * q10;
        const double n2 = std::sqrt(std::norm(w0) + std::norm(w1));
        if (n2 < 1e-6) continue;

        return {q00, w0 / n2, q10, w1 / n2, arm};
    }
}

}  // namespace entsim
