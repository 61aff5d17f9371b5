#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entsim/coincidence.hpp"
#include "entsim/measure.hpp"
#include "entsim/optics.hpp"
#include "entsim/qstate.hpp"

// Scenario-driven front end: parse a declarative experiment file, run the
// requested analyses, and emit human-readable tables plus machine-readable
// JSON/CSV.
//
// Scenario grammar (one directive per line, '#' starts a comment line,
// angles in degrees; see README for the full reference):
//
//   state singlet
//   state <c0> <c1> <c2> <c3>        canonical VV VH HV HH amplitudes
//   opA qwp
//   opA retarder <delta> <axis>
//   opA matrix <m00> <m01> <m10> <m11>
//   opB ...
//   measure <basis> <basis>          basis := circular | linear <angle>
//                                           | explicit <e0V> <e0H> <e1V> <e1H>
//   shots <n>
//   seed <n>
//   coincidence rate=<r> duration=<s> window=<s> [effA= effB= jitter= darkA= darkB=]
//
// Complex tokens: 1, -0.5, i, -i, 2i, 1+2i, 1.5e-3-2e-4i.

namespace entsim {

struct ParseIssue {
    int line;  // 1-based; 0 for file-level problems
    std::string message;
};

class ScenarioParseError : public std::runtime_error {
  public:
    explicit ScenarioParseError(std::vector<ParseIssue> issues)
        : std::runtime_error(format(issues)), issues_(std::move(issues)) {}

    const std::vector<ParseIssue>& issues() const { return issues_; }

  private:
    static std::string format(const std::vector<ParseIssue>& issues) {
        std::string out;
        for (const auto& issue : issues) {
            if (!out.empty()) out += '\n';
            out += "line " + std::to_string(issue.line) + ": " + issue.message;
        }
        return out.empty() ? std::string("scenario parse error") : out;
    }

    std::vector<ParseIssue> issues_;
};

struct CoincidenceSpec {
    PairSourceSpec source;
    double duration;  // seconds
    double window;    // seconds
};

struct Scenario {
    std::string name;
    TwoPhotonState initial_state;
    std::vector<LocalOperator> ops_a, ops_b;
    std::vector<std::pair<PolarizationBasis, PolarizationBasis>> measurements;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    std::optional<CoincidenceSpec> coincidence;
};

namespace detail {

inline std::optional<double> parse_real(std::string_view tok) {
    double value{};
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [p, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || p != end) return std::nullopt;
    return value;
}

// Accepted forms: 1, -0.5, i, -i, 2i, 1+2i, 1-2i, 1.5e-3-2e-4i.
inline std::optional<Amplitude> parse_complex(std::string_view tok) {
    if (tok.empty()) return std::nullopt;
    if (tok == "i") return Amplitude{0.0, 1.0};
    if (tok == "-i") return Amplitude{0.0, -1.0};

    const char* begin = tok.data();
    const char* end = begin + tok.size();
    double first{};
    auto [p, ec] = std::from_chars(begin, end, first);
    if (ec != std::errc{}) return std::nullopt;
    if (p == end) return Amplitude{first, 0.0};
    if (p + 1 == end && *p == 'i') return Amplitude{0.0, first};

    if (*p != '+' && *p != '-') return std::nullopt;
    const double sign = *p == '-' ? -1.0 : 1.0;
    if (p + 2 == end && *(p + 1) == 'i') return Amplitude{first, sign};

    const char* imag_begin = p + 1;
    if (imag_begin == end || !(std::isdigit(static_cast<unsigned char>(*imag_begin)) ||
                               *imag_begin == '.'))
        return std::nullopt;
    double mag{};
    auto [p2, ec2] = std::from_chars(imag_begin, end, mag);
    if (ec2 != std::errc{} || p2 + 1 != end || *p2 != 'i') return std::nullopt;
    return Amplitude{first, sign * mag};
}

inline std::vector<std::string> split_tokens(std::string_view line) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        std::size_t start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos > start) tokens.emplace_back(line.substr(start, pos - start));
    }
    return tokens;
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Deterministic per-measurement sub-seed, shared between sampling and the
// coincidence pipeline so the noiseless pipeline reproduces sample().
inline std::uint64_t measurement_seed(std::uint64_t seed, std::size_t index) {
    return mix64(mix64(seed) ^ (0x4d454153ULL + index));
}

}  // namespace detail

// Parse scenario text. Throws ScenarioParseError carrying every issue found,
// each with its 1-based line number.
inline Scenario parse_scenario(std::string_view text, std::string name = "scenario") {
    std::vector<ParseIssue> issues;
    std::optional<TwoPhotonState> state;
    std::vector<LocalOperator> ops_a, ops_b;
    std::vector<std::pair<PolarizationBasis, PolarizationBasis>> measurements;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    std::optional<CoincidenceSpec> coincidence;
    bool saw_shots = false, saw_seed = false;

    const auto fail = [&issues](int line, std::string message) {
        issues.push_back({line, std::move(message)});
    };

    // Consume one basis spec starting at tokens[pos]; advances pos.
    const auto parse_basis = [&](const std::vector<std::string>& tokens, std::size_t& pos,
                                 int line) -> std::optional<PolarizationBasis> {
        if (pos >= tokens.size()) {
            fail(line, "expected a basis spec (circular | linear <angle> | explicit <4 amplitudes>)");
            return std::nullopt;
        }
        const std::string kind = tokens[pos++];
        if (kind == "circular") return circular_basis();
        if (kind == "linear") {
            if (pos >= tokens.size()) {
                fail(line, "linear basis needs an angle in degrees");
                return std::nullopt;
            }
            const auto deg = detail::parse_real(tokens[pos++]);
            if (!deg) {
                fail(line, "malformed angle '" + tokens[pos - 1] + "'");
                return std::nullopt;
            }
            return linear_basis(detail::deg_to_rad(*deg));
        }
        if (kind == "explicit") {
            std::array<Amplitude, 4> c{};
            for (auto& target : c) {
                if (pos >= tokens.size()) {
                    fail(line, "explicit basis needs four amplitudes (e0V e0H e1V e1H)");
                    return std::nullopt;
                }
                const auto amp = detail::parse_complex(tokens[pos++]);
                if (!amp) {
                    fail(line, "malformed amplitude '" + tokens[pos - 1] + "'");
                    return std::nullopt;
                }
                target = *amp;
            }
            try {
                return PolarizationBasis{PolVector{c[0], c[1]}, PolVector{c[2], c[3]}, "e0", "e1"};
            } catch (const ContractViolation& e) {
                fail(line, e.what());
                return std::nullopt;
            }
        }
        fail(line, "unknown basis kind '" + kind + "'");
        return std::nullopt;
    };

    const auto parse_operator = [&](const std::vector<std::string>& tokens, Arm arm,
                                    int line) -> std::optional<LocalOperator> {
        if (tokens.size() < 2) {
            fail(line, "operator directive needs a kind (qwp | retarder | matrix)");
            return std::nullopt;
        }
        const std::string& kind = tokens[1];
        if (kind == "qwp") {
            if (tokens.size() != 2) fail(line, "qwp takes no arguments");
            return paper_qwp(arm);
        }
        if (kind == "retarder") {
            if (tokens.size() != 4) {
                fail(line, "retarder needs <retardance> <fast-axis angle>, both in degrees");
                return std::nullopt;
            }
            const auto delta = detail::parse_real(tokens[2]);
            const auto axis = detail::parse_real(tokens[3]);
            if (!delta || !axis) {
                fail(line, "malformed retarder parameters");
                return std::nullopt;
            }
            try {
                return retarder(RetarderSpec{detail::deg_to_rad(*delta), detail::deg_to_rad(*axis)},
                                arm);
            } catch (const ContractViolation& e) {
                fail(line, e.what());
                return std::nullopt;
            }
        }
        if (kind == "matrix") {
            if (tokens.size() != 6) {
                fail(line, "matrix needs four amplitudes (m00 m01 m10 m11)");
                return std::nullopt;
            }
            std::array<Amplitude, 4> m{};
            for (int k = 0; k < 4; ++k) {
                const auto amp = detail::parse_complex(tokens[2 + k]);
                if (!amp) {
                    fail(line, "malformed amplitude '" + tokens[2 + k] + "'");
                    return std::nullopt;
                }
                m[k] = *amp;
            }
            try {
                return LocalOperator{m[0], m[1], m[2], m[3], arm};
            } catch (const ContractViolation& e) {
                fail(line, e.what());
                return std::nullopt;
            }
        }
        fail(line, "unknown operator kind '" + kind + "'");
        return std::nullopt;
    };

    std::istringstream stream{std::string(text)};
    std::string raw;
    for (int line = 1; std::getline(stream, raw); ++line) {
        const auto tokens = detail::split_tokens(raw);
        if (tokens.empty() || tokens[0][0] == '#') continue;
        const std::string& directive = tokens[0];

        if (directive == "state") {
            if (state) {
                fail(line, "duplicate 'state' directive");
                continue;
            }
            if (tokens.size() == 2 && tokens[1] == "singlet") {
                state = make_singlet();
            } else if (tokens.size() == 5) {
                std::array<Amplitude, 4> c{};
                bool ok = true;
                for (int k = 0; k < 4; ++k) {
                    const auto amp = detail::parse_complex(tokens[1 + k]);
                    if (!amp) {
                        fail(line, "malformed amplitude '" + tokens[1 + k] + "'");
                        ok = false;
                        break;
                    }
                    c[k] = *amp;
                }
                if (!ok) continue;
                double norm2 = 0.0;
                for (const auto& amp : c) norm2 += std::norm(amp);
                if (std::abs(norm2 - 1.0) > 1e-9) {
                    fail(line, "state amplitudes not normalized (|psi|^2 = " +
                                   std::to_string(norm2) + ")");
                    continue;
                }
                const double scale = 1.0 / std::sqrt(norm2);
                for (auto& amp : c) amp *= scale;
                state = TwoPhotonState::from_canonical(c, canonical_basis(), canonical_basis());
            } else {
                fail(line, "state needs 'singlet' or four amplitudes (VV VH HV HH)");
            }
        } else if (directive == "opA" || directive == "opB") {
            const Arm arm = directive == "opA" ? Arm::A : Arm::B;
            if (const auto op = parse_operator(tokens, arm, line))
                (arm == Arm::A ? ops_a : ops_b).push_back(*op);
        } else if (directive == "measure") {
            std::size_t pos = 1;
            const auto basis_a = parse_basis(tokens, pos, line);
            const auto basis_b = parse_basis(tokens, pos, line);
            if (!basis_a || !basis_b) continue;
            if (pos != tokens.size()) {
                fail(line, "unexpected trailing tokens after measure directive");
                continue;
            }
            measurements.emplace_back(*basis_a, *basis_b);
        } else if (directive == "shots") {
            if (saw_shots) {
                fail(line, "duplicate 'shots' directive");
                continue;
            }
            saw_shots = true;
            std::int64_t value{};
            const char* begin = tokens.size() > 1 ? tokens[1].data() : nullptr;
            if (tokens.size() != 2 ||
                std::from_chars(begin, begin + tokens[1].size(), value).ec != std::errc{} ||
                value < 0) {
                fail(line, "shots needs one non-negative integer");
                continue;
            }
            shots = value;
        } else if (directive == "seed") {
            if (saw_seed) {
                fail(line, "duplicate 'seed' directive");
                continue;
            }
            saw_seed = true;
            std::uint64_t value{};
            const char* begin = tokens.size() > 1 ? tokens[1].data() : nullptr;
            if (tokens.size() != 2 ||
                std::from_chars(begin, begin + tokens[1].size(), value).ec != std::errc{}) {
                fail(line, "seed needs one non-negative integer");
                continue;
            }
            seed = value;
        } else if (directive == "coincidence") {
            if (coincidence) {
                fail(line, "duplicate 'coincidence' directive");
                continue;
            }
            PairSourceSpec src;
            double duration = 0.0, window = 0.0;
            bool saw_rate = false, saw_duration = false, saw_window = false, ok = true;
            for (std::size_t k = 1; k < tokens.size(); ++k) {
                const auto eq = tokens[k].find('=');
                const std::string key = tokens[k].substr(0, eq);
                std::optional<double> value;
                if (eq != std::string::npos) value = detail::parse_real(tokens[k].substr(eq + 1));
                if (!value) {
                    fail(line, "malformed key=value pair '" + tokens[k] + "'");
                    ok = false;
                    break;
                }
                if (key == "rate") {
                    src.pair_rate = *value;
                    saw_rate = true;
                } else if (key == "duration") {
                    duration = *value;
                    saw_duration = true;
                } else if (key == "window") {
                    window = *value;
                    saw_window = true;
                } else if (key == "effA") {
                    src.efficiency_a = *value;
                } else if (key == "effB") {
                    src.efficiency_b = *value;
                } else if (key == "jitter") {
                    src.jitter_sigma = *value;
                } else if (key == "darkA") {
                    src.dark_rate_a = *value;
                } else if (key == "darkB") {
                    src.dark_rate_b = *value;
                } else {
                    fail(line, "unknown coincidence key '" + key + "'");
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (!saw_rate || !saw_duration || !saw_window) {
                fail(line, "coincidence requires rate=, duration= and window=");
                continue;
            }
            try {
                src.validate();
                require(duration > 0.0, "coincidence duration must be > 0");
                require(window > 0.0, "coincidence window must be > 0");
            } catch (const ContractViolation& e) {
                fail(line, e.what());
                continue;
            }
            coincidence = CoincidenceSpec{src, duration, window};
        } else {
            fail(line, "unknown directive '" + directive + "'");
        }
    }

    if (!state && issues.empty()) fail(0, "no initial state");
    if (!issues.empty()) throw ScenarioParseError{std::move(issues)};
    return Scenario{std::move(name), *state,       std::move(ops_a), std::move(ops_b),
                    std::move(measurements), shots, seed,            coincidence};
}

// Read and parse a scenario file; the scenario name is the file stem.
inline Scenario load_scenario(const std::string& path) {
    std::ifstream in{path};
    if (!in) throw ScenarioParseError{{{0, "cannot open scenario file '" + path + "'"}}};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string name = path;
    if (const auto slash = name.find_last_of("/\\"); slash != std::string::npos)
        name = name.substr(slash + 1);
    if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0)
        name = name.substr(0, dot);
    return parse_scenario(buffer.str(), std::move(name));
}

struct SampledTable {
    std::int64_t shots;
    std::array<std::array<double, 2>, 2> freq;
};

struct CoincidenceRun {
    CoincidenceResult result;
    std::optional<CoincidenceStats> stats;  // absent when no coincidences landed
};

struct MeasurementResult {
    std::string basis_a_label, basis_b_label;
    std::array<std::array<double, 2>, 2> p;  // analytic Born table
    double correlation;
    std::array<double, 2> marginal_a, marginal_b;
    std::optional<SampledTable> sampled;
    std::optional<CoincidenceRun> coincidence;
};

struct ChshResult {
    double analytic;                  // E1 + E2 + E3 - E4 over the four pairs
    std::optional<double> sampled;
    std::optional<double> sampled_se;
};

struct ScenarioReport {
    std::string scenario;
    std::uint64_t seed;
    EntanglementReport entanglement_before, entanglement_after;
    NoSignalingReport no_signaling;
    std::vector<MeasurementResult> measurements;
    std::optional<ChshResult> chsh;
};

struct RunOptions {
    bool measurements = true;
    bool sampling = true;     // honor scenario shots
    bool coincidence = true;  // honor scenario coincidence spec
    bool chsh = false;        // combine four measurement pairs into S
};

inline ScenarioReport run_scenario(const Scenario& sc, const RunOptions& opts = {}) {
    TwoPhotonState evolved = sc.initial_state;
    for (const auto& op : sc.ops_a) evolved = apply_local(evolved, op);
    for (const auto& op : sc.ops_b) evolved = apply_local(evolved, op);

    // Probe every distinct arm-B measurement basis plus the canonical and
    // circular bases, so the check is non-trivial for every scenario.
    std::vector<AnalyzerSetting> probes{{Arm::B, canonical_basis()}, {Arm::B, circular_basis()}};
    for (const auto& [basis_a, basis_b] : sc.measurements) {
        bool known = false;
        for (const auto& probe : probes)
            if (same_basis(probe.basis, basis_b)) {
                known = true;
                break;
            }
        if (!known) probes.push_back({Arm::B, basis_b});
    }

    ScenarioReport report{sc.name,
                          sc.seed,
                          entanglement_report(sc.initial_state),
                          entanglement_report(evolved),
                          verify_no_signaling(sc.initial_state, sc.ops_a, probes, kComputeTol),
                          {},
                          std::nullopt};

    if (!opts.measurements) return report;

    for (std::size_t k = 0; k < sc.measurements.size(); ++k) {
        const AnalyzerSetting a{Arm::A, sc.measurements[k].first};
        const AnalyzerSetting b{Arm::B, sc.measurements[k].second};
        const JointDistribution dist = joint_distribution(evolved, a, b);
        const std::uint64_t sub_seed = detail::measurement_seed(sc.seed, k);

        MeasurementResult mr{a.basis.label(),  b.basis.label(),       dist.table(),
                             correlation_of(dist), marginal(evolved, a), marginal(evolved, b),
                             std::nullopt,     std::nullopt};

        if (opts.sampling && sc.shots > 0) {
            SampledTable st{sc.shots, {}};
            for (const auto& rec : sample(evolved, a, b, sc.shots, sub_seed))
                st.freq[rec.outcome_a][rec.outcome_b] += 1.0;
            for (auto& row : st.freq)
                for (auto& cell : row) cell /= static_cast<double>(sc.shots);
            mr.sampled = st;
        }

        if (opts.coincidence && sc.coincidence) {
            const auto& spec = *sc.coincidence;
            const auto [sa, sb] = generate_streams(evolved, a, b, spec.source, spec.duration,
                                                   sub_seed);
            CoincidenceRun run{match_coincidences(sa, sb, spec.window), std::nullopt};
            if (run.result.total() > 0) run.stats = estimate_statistics(run.result);
            mr.coincidence = run;
        }

        report.measurements.push_back(std::move(mr));
    }

    if (opts.chsh) {
        require(report.measurements.size() == 4,
                "chsh: scenario must define exactly four measurement pairs "
                "(a0 b0, a0 b1, a1 b0, a1 b1)");
        ChshResult result{report.measurements[0].correlation + report.measurements[1].correlation +
                              report.measurements[2].correlation -
                              report.measurements[3].correlation,
                          std::nullopt, std::nullopt};
        bool have_sampled = true;
        for (const auto& mr : report.measurements) have_sampled &= mr.sampled.has_value();
        if (have_sampled) {
            double s = 0.0, var = 0.0;
            const std::array<double, 4> signs{1.0, 1.0, 1.0, -1.0};
            for (int k = 0; k < 4; ++k) {
                const auto& st = *report.measurements[k].sampled;
                const double q = st.freq[0][0] + st.freq[1][1];
                const double e = 2.0 * q - 1.0;
                s += signs[k] * e;
                var += 4.0 * q * (1.0 - q) / static_cast<double>(st.shots);
            }
            result.sampled = s;
            result.sampled_se = std::sqrt(var);
        }
        report.chsh = result;
    }
    return report;
}

enum class EmitFormat { Table, Json, Csv };

namespace detail {

inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void emit_table(std::ostringstream& os, const ScenarioReport& report) {
    os << "scenario: " << report.scenario << "    seed: " << report.seed << '\n';
    const auto ent_line = [&](const char* tag, const EntanglementReport& er) {
        os << "  " << tag << ": concurrence " << fmt12(er.concurrence) << ", schmidt ("
           << fmt12(er.schmidt[0]) << ", " << fmt12(er.schmidt[1]) << ")\n";
    };
    os << "entanglement\n";
    ent_line("before ops", report.entanglement_before);
    ent_line("after ops ", report.entanglement_after);

    const auto& ns = report.no_signaling;
    os << "no-signaling on arm B (tolerance " << fmt12(ns.tolerance) << "): "
       << (ns.pass ? "PASS" : "FAIL") << ", max deviation " << fmt12(ns.max_deviation) << '\n';
    for (const auto& probe : ns.probes)
        os << "  probe " << probe.basis_label << ": deviation " << fmt12(probe.deviation) << '\n';

    int index = 1;
    for (const auto& mr : report.measurements) {
        os << "measurement " << index++ << ": A in " << mr.basis_a_label << ", B in "
           << mr.basis_b_label << '\n';
        os << "  analytic p(outA,outB):";
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                os << "  p" << i << j << "=" << fmt12(mr.p[i][j]);
        os << '\n';
        os << "  E = " << fmt12(mr.correlation) << '\n';
        os << "  marginal A = (" << fmt12(mr.marginal_a[0]) << ", " << fmt12(mr.marginal_a[1])
           << "), marginal B = (" << fmt12(mr.marginal_b[0]) << ", " << fmt12(mr.marginal_b[1])
           << ")\n";
        if (mr.sampled) {
            os << "  sampled (" << mr.sampled->shots << " shots):";
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    os << "  f" << i << j << "=" << fmt12(mr.sampled->freq[i][j]);
            os << '\n';
        }
        if (mr.coincidence) {
            const auto& run = *mr.coincidence;
            os << "  coincidences (window " << fmt12(run.result.window) << " s):";
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    os << "  n" << i << j << "=" << run.result.counts[i][j];
            os << '\n';
            os << "  singles A = (" << run.result.singles_a[0] << ", " << run.result.singles_a[1]
               << "), singles B = (" << run.result.singles_b[0] << ", "
               << run.result.singles_b[1]
               << "), accidentals estimate = " << fmt12(run.result.accidentals_estimate) << '\n';
            if (run.stats)
                os << "  estimated E = " << fmt12(run.stats->correlation) << " +- "
                   << fmt12(run.stats->correlation_se) << " (" << run.stats->total
                   << " coincidences)\n";
            else
                os << "  no coincidences recorded\n";
        }
    }
    if (report.chsh) {
        os << "CHSH S = E1 + E2 + E3 - E4 = " << fmt12(report.chsh->analytic) << '\n';
        if (report.chsh->sampled)
            os << "CHSH sampled S = " << fmt12(*report.chsh->sampled) << " +- "
               << fmt12(*report.chsh->sampled_se) << '\n';
    }
}

inline nlohmann::ordered_json table_json(const std::array<std::array<double, 2>, 2>& t) {
    return nlohmann::ordered_json::array({{t[0][0], t[0][1]}, {t[1][0], t[1][1]}});
}

inline void emit_json(std::ostringstream& os, const ScenarioReport& report) {
    using json = nlohmann::ordered_json;
    json root;
    root["scenario"] = report.scenario;
    root["seed"] = report.seed;
    const auto ent_json = [](const EntanglementReport& er) {
        return json{{"concurrence", er.concurrence},
                    {"schmidt", {er.schmidt[0], er.schmidt[1]}}};
    };
    root["entanglement"] = {{"before", ent_json(report.entanglement_before)},
                            {"after", ent_json(report.entanglement_after)}};
    json probes = json::array();
    for (const auto& probe : report.no_signaling.probes)
        probes.push_back({{"basis", probe.basis_label}, {"deviation", probe.deviation}});
    root["no_signaling"] = {{"pass", report.no_signaling.pass},
                            {"tolerance", report.no_signaling.tolerance},
                            {"max_deviation", report.no_signaling.max_deviation},
                            {"probes", probes}};
    json measurements = json::array();
    for (const auto& mr : report.measurements) {
        json m;
        m["basis_a"] = mr.basis_a_label;
        m["basis_b"] = mr.basis_b_label;
        m["p_analytic"] = table_json(mr.p);
        m["correlation"] = mr.correlation;
        m["marginal_a"] = {mr.marginal_a[0], mr.marginal_a[1]};
        m["marginal_b"] = {mr.marginal_b[0], mr.marginal_b[1]};
        if (mr.sampled)
            m["sampled"] = {{"shots", mr.sampled->shots}, {"freq", table_json(mr.sampled->freq)}};
        if (mr.coincidence) {
            const auto& run = *mr.coincidence;
            json c;
            c["window"] = run.result.window;
            c["counts"] = {{run.result.counts[0][0], run.result.counts[0][1]},
                           {run.result.counts[1][0], run.result.counts[1][1]}};
            c["singles_a"] = {run.result.singles_a[0], run.result.singles_a[1]};
            c["singles_b"] = {run.result.singles_b[0], run.result.singles_b[1]};
            c["accidentals_estimate"] = run.result.accidentals_estimate;
            if (run.stats) {
                c["freq"] = table_json(run.stats->freq);
                c["correlation"] = run.stats->correlation;
                c["correlation_se"] = run.stats->correlation_se;
                c["total"] = run.stats->total;
            }
            m["coincidence"] = c;
        }
        measurements.push_back(m);
    }
    root["measurements"] = measurements;
    if (report.chsh) {
        json c;
        c["analytic"] = report.chsh->analytic;
        if (report.chsh->sampled) {
            c["sampled"] = *report.chsh->sampled;
            c["sampled_se"] = *report.chsh->sampled_se;
        }
        root["chsh"] = c;
    }
    os << root.dump(2) << '\n';
}

inline void emit_csv(std::ostringstream& os, const ScenarioReport& report) {
    os << "scenario,basisA,basisB,outA,outB,p_analytic,freq_sampled,n_shots\n";
    for (const auto& mr : report.measurements) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                os << report.scenario << ',' << mr.basis_a_label << ',' << mr.basis_b_label << ','
                   << i << ',' << j << ',' << fmt12(mr.p[i][j]) << ',';
                if (mr.sampled) os << fmt12(mr.sampled->freq[i][j]);
                os << ',' << (mr.sampled ? mr.sampled->shots : 0) << '\n';
            }
    }
}

}  // namespace detail

inline std::string emit(const ScenarioReport& report, EmitFormat format) {
    std::ostringstream os;
    switch (format) {
        case EmitFormat::Table: detail::emit_table(os, report); break;
        case EmitFormat::Json: detail::emit_json(os, report); break;
        case EmitFormat::Csv: detail::emit_csv(os, report); break;
    }
    return os.str();
}

}  // namespace entsim
