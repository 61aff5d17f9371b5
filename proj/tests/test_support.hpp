#pragma once

// Shared helpers for the unit tests: tolerance checks and deterministic
// random generators for states, bases and analyzer settings.

#include <array>
#include <cmath>
#include <cstdint>

#include "entsim/measure.hpp"
#include "entsim/optics.hpp"
#include "entsim/qstate.hpp"
#include "entsim/rng.hpp"

namespace test_support {

using entsim::Amplitude;

inline bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

inline bool close(Amplitude a, Amplitude b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

inline bool close_quad(const std::array<Amplitude, 4>& a, const std::array<Amplitude, 4>& b,
                       double tol = 1e-12) {
    for (int k = 0; k < 4; ++k)
        if (!close(a[k], b[k], tol)) return false;
    return true;
}

// Random pure two-photon state from 8 gaussians, normalized.
inline entsim::TwoPhotonState random_state(std::uint64_t seed) {
    const entsim::RandomStream rs{seed, 0x53544154};  // "STAT"
    std::array<Amplitude, 4> c;
    double norm2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        c[k] = Amplitude{rs.gaussian(0, 4 * k), rs.gaussian(0, 4 * k + 2)};
        norm2 += std::norm(c[k]);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& amp : c) amp *= scale;
    return entsim::TwoPhotonState::from_canonical(c, entsim::canonical_basis(),
                                                  entsim::canonical_basis());
}

// Random orthonormal basis: the columns of a Haar-random unitary.
inline entsim::PolarizationBasis random_basis(std::uint64_t seed) {
    const entsim::LocalOperator u = entsim::random_local_unitary(seed);
    return {u.apply(entsim::PolVector{1.0, 0.0}), u.apply(entsim::PolVector{0.0, 1.0}),
            "e0", "e1"};
}

inline entsim::AnalyzerSetting random_setting(entsim::Arm arm, std::uint64_t seed) {
    return {arm, random_basis(seed)};
}

// Random product state |a> (x) |b>.
inline entsim::TwoPhotonState random_product_state(std::uint64_t seed) {
    const entsim::PolVector a = random_basis(seed).e0();
    const entsim::PolVector b = random_basis(~seed).e0();
    return entsim::TwoPhotonState::from_canonical(
        {a.v() * b.v(), a.v() * b.h(), a.h() * b.v(), a.h() * b.h()},
        entsim::canonical_basis(), entsim::canonical_basis());
}

}  // namespace test_support
