#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "entsim/optics.hpp"
#include "entsim/qstate.hpp"
#include "entsim/rng.hpp"

// Born-rule statistics: joint and marginal probability tables, correlation
// coefficients, the CHSH statistic, seeded Monte Carlo sampling, exact
// no-signaling verification, entanglement quantification, and recovery of
// the measurement bases that restore the singlet correlations.
//
// Outcome encoding: outcome 0 <-> basis vector e0, outcome 1 <-> e1, per arm.

namespace entsim {

// Tolerance for quantities accumulated over a few dozen arithmetic steps.
inline constexpr double kComputeTol = 1e-9;

// The 2x2 Born-rule probability table for one (settingA, settingB) choice,
// indexed by (outcomeA, outcomeB).
class JointDistribution {
  public:
    JointDistribution(const std::array<std::array<double, 2>, 2>& p, AnalyzerSetting setting_a,
                      AnalyzerSetting setting_b)
        : p_(p), setting_a_(std::move(setting_a)), setting_b_(std::move(setting_b)) {
        double total = 0.0;
        for (const auto& row : p_)
            for (double v : row) {
                require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                        "JointDistribution: entry outside [0, 1]");
                total += v;
            }
        require(std::abs(total - 1.0) <= kComputeTol, "JointDistribution: table does not sum to 1");
    }

    double p(int outcome_a, int outcome_b) const { return p_[outcome_a][outcome_b]; }
    const std::array<std::array<double, 2>, 2>& table() const { return p_; }
    const AnalyzerSetting& setting_a() const { return setting_a_; }
    const AnalyzerSetting& setting_b() const { return setting_b_; }

  private:
    std::array<std::array<double, 2>, 2> p_;
    AnalyzerSetting setting_a_, setting_b_;
};

// p(i,j) = |<a_i (x) b_j | s>|^2. The first setting must sit on arm A, the
// second on arm B.
inline JointDistribution joint_distribution(const TwoPhotonState& s, const AnalyzerSetting& a,
                                            const AnalyzerSetting& b) {
    require(a.arm == Arm::A && b.arm == Arm::B,
            "joint_distribution: settings must be on arms A and B, in that order");
    std::array<std::array<double, 2>, 2> p{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            p[i][j] = std::norm(s.project(a.basis.vector(i), b.basis.vector(j)));
    return {p, a, b};
}

// Outcome probabilities on one arm alone; equals the row or column sums of
// any compatible joint table.
inline std::array<double, 2> marginal(const TwoPhotonState& s, const AnalyzerSetting& setting) {
    const auto& c = s.canonical_amps();
    std::array<double, 2> out{};
    for (int k = 0; k < 2; ++k) {
        const PolVector& e = setting.basis.vector(k);
        if (setting.arm == Arm::A) {
            // Project arm A on e, sum |.|^2 over the canonical B index.
            out[k] = std::norm(std::conj(e.v()) * c[0] + std::conj(e.h()) * c[2]) +
                     std::norm(std::conj(e.v()) * c[1] + std::conj(e.h()) * c[3]);
        } else {
            out[k] = std::norm(std::conj(e.v()) * c[0] + std::conj(e.h()) * c[1]) +
                     std::norm(std::conj(e.v()) * c[2] + std::conj(e.h()) * c[3]);
        }
    }
    return out;
}

// E = p00 + p11 - p01 - p10, in [-1, 1].
inline double correlation_of(const JointDistribution& d) {
    return d.p(0, 0) + d.p(1, 1) - d.p(0, 1) - d.p(1, 0);
}

inline double correlation(const TwoPhotonState& s, const AnalyzerSetting& a,
                          const AnalyzerSetting& b) {
    return correlation_of(joint_distribution(s, a, b));
}

// S = E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1).
inline double chsh(const TwoPhotonState& s, const AnalyzerSetting& a0, const AnalyzerSetting& a1,
                   const AnalyzerSetting& b0, const AnalyzerSetting& b1) {
    require(a0.arm == Arm::A && a1.arm == Arm::A, "chsh: a-settings must be on arm A");
    require(b0.arm == Arm::B && b1.arm == Arm::B, "chsh: b-settings must be on arm B");
    return correlation(s, a0, b0) + correlation(s, a0, b1) + correlation(s, a1, b0) -
           correlation(s, a1, b1);
}

struct SampleRecord {
    std::int64_t shot;
    int outcome_a;  // 0 or 1
    int outcome_b;  // 0 or 1
};

namespace detail {
// Inverse CDF over the four cells in (0,0),(0,1),(1,0),(1,1) order.
inline std::pair<int, int> born_outcome(const JointDistribution& d, double u) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            acc += d.p(i, j);
            if (u < acc) return {i, j};
        }
    return {1, 1};
}
}  // namespace detail

// i.i.d. draws from joint_distribution(s, a, b). Deterministic per seed; shot
// k depends only on (seed, k), so the sequence may be generated in any order.
inline std::vector<SampleRecord> sample(const TwoPhotonState& s, const AnalyzerSetting& a,
                                        const AnalyzerSetting& b, std::int64_t shots,
                                        std::uint64_t seed) {
    require(shots >= 1, "sample: shots must be >= 1");
    const JointDistribution d = joint_distribution(s, a, b);
    const RandomStream born{seed, kStreamBorn};
    std::vector<SampleRecord> records;
    records.reserve(static_cast<std::size_t>(shots));
    for (std::int64_t k = 0; k < shots; ++k) {
        const auto [i, j] = detail::born_outcome(d, born.uniform(static_cast<std::uint64_t>(k)));
        records.push_back({k, i, j});
    }
    return records;
}

struct NoSignalingProbe {
    std::string basis_label;
    double deviation;  // max |marginal before - marginal after| over outcomes
};

struct NoSignalingReport {
    bool pass;
    double max_deviation;
    double tolerance;
    std::vector<NoSignalingProbe> probes;
};

// The sense in which entanglement is not a remote control: for every probe
// basis on arm B, the B marginals are identical before and after any local
// operations on arm A. Compares exact analytic marginals, not samples.
inline NoSignalingReport verify_no_signaling(const TwoPhotonState& s,
                                             const std::vector<LocalOperator>& ops_a,
                                             const std::vector<AnalyzerSetting>& probes_b,
                                             double tol) {
    for (const auto& op : ops_a)
        require(op.arm() == Arm::A, "verify_no_signaling: operator list contains an arm-B op");
    for (const auto& probe : probes_b)
        require(probe.arm == Arm::B, "verify_no_signaling: probe setting not on arm B");

    TwoPhotonState after = s;
    for (const auto& op : ops_a) after = apply_local(after, op);

    NoSignalingReport report{true, 0.0, tol, {}};
    for (const auto& probe : probes_b) {
        const auto before_p = marginal(s, probe);
        const auto after_p = marginal(after, probe);
        const double dev = std::max(std::abs(before_p[0] - after_p[0]),
                                    std::abs(before_p[1] - after_p[1]));
        report.probes.push_back({probe.basis.label(), dev});
        report.max_deviation = std::max(report.max_deviation, dev);
    }
    report.pass = report.max_deviation <= tol;
    return report;
}

struct EntanglementReport {
    double concurrence;                // in [0, 1]
    std::array<double, 2> schmidt;     // descending; squares sum to 1
};

// Schmidt coefficients are the singular values of the 2x2 amplitude matrix,
// computed from the closed-form eigenvalues of M^dag M; concurrence is
// 2*lambda0*lambda1 (equivalently 2|det M| for pure states).
inline EntanglementReport entanglement_report(const TwoPhotonState& s) {
    const auto& c = s.canonical_amps();
    // M = [[c0, c1], [c2, c3]]; G = M^dag M has trace 1 (normalization) and
    // det |det M|^2; its eigenvalues are the squared singular values.
    const double trace = std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]) + std::norm(c[3]);
    const Amplitude det_m = c[0] * c[3] - c[1] * c[2];
    const double disc = std::max(0.0, trace * trace - 4.0 * std::norm(det_m));
    const double root = std::sqrt(disc);
    const double sv0 = std::sqrt(std::max(0.0, (trace + root) / 2.0));
    const double sv1 = std::sqrt(std::max(0.0, (trace - root) / 2.0));
    return {2.0 * sv0 * sv1, {sv0, sv1}};
}

// Given the composed local-unitary histories U_A, U_B, the bases
// {U_A|V>, U_A|H>} and {U_B|V>, U_B|H>} restore the Eq. 1 anticorrelation
// table for the evolved singlet: the rotated-frame coordinates coincide with
// the original ones.
inline std::pair<AnalyzerSetting, AnalyzerSetting> recover_correlation_bases(
    const std::vector<LocalOperator>& history_a, const std::vector<LocalOperator>& history_b) {
    const auto composed = [](const std::vector<LocalOperator>& history, Arm arm) {
        LocalOperator u = LocalOperator::identity(arm);
        for (const auto& op : history) {
            require(op.arm() == arm, "recover_correlation_bases: operator on the wrong arm");
            u = compose(u, op);
        }
        return u;
    };
    const LocalOperator ua = composed(history_a, Arm::A);
    const LocalOperator ub = composed(history_b, Arm::B);
    const auto rotated = [](const LocalOperator& u) {
        return PolarizationBasis{u.apply(PolVector{1.0, 0.0}), u.apply(PolVector{0.0, 1.0}),
                                 "V'", "H'"};
    };
    return {AnalyzerSetting{Arm::A, rotated(ua)}, AnalyzerSetting{Arm::B, rotated(ub)}};
}

}  // namespace entsim
