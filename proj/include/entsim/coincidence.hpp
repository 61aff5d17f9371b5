#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entsim/measure.hpp"
#include "entsim/rng.hpp"

// Experiment-shaped event layer: turns Born-rule outcomes into time-tagged
// detector streams at two stations and reconstructs joint statistics by
// coincidence-window matching, the way the real two-photon experiments count
// correlations.

namespace entsim {

// Raised when a result is requested from data that contains no counts.
struct EmptyResultError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TagEvent {
    double timestamp;  // seconds
    int channel;       // 0 or 1
};

// Time-ordered detector events for one station. Timestamps are strictly
// increasing; construction enforces it.
class TagStream {
  public:
    TagStream(Arm station, std::vector<TagEvent> events)
        : station_(station), events_(std::move(events)) {
        for (std::size_t k = 0; k < events_.size(); ++k) {
            require(std::isfinite(events_[k].timestamp), "TagStream: non-finite timestamp");
            require(events_[k].channel == 0 || events_[k].channel == 1,
                    "TagStream: channel must be 0 or 1");
            require(k == 0 || events_[k - 1].timestamp < events_[k].timestamp,
                    "TagStream: timestamps not strictly increasing");
        }
    }

    Arm station() const { return station_; }
    const std::vector<TagEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

  private:
    Arm station_;
    std::vector<TagEvent> events_;
};

// Phenomenological source and detector model: ideal entangled pairs plus
// losses, timing jitter, and dark counts.
struct PairSourceSpec {
    double pair_rate = 0.0;      // pairs / second
    double efficiency_a = 1.0;   // in [0, 1]
    double efficiency_b = 1.0;
    double jitter_sigma = 0.0;   // seconds, per-event Gaussian
    double dark_rate_a = 0.0;    // counts / second
    double dark_rate_b = 0.0;

    void validate() const {
        require(std::isfinite(pair_rate) && pair_rate >= 0.0, "PairSourceSpec: bad pair rate");
        require(efficiency_a >= 0.0 && efficiency_a <= 1.0 && efficiency_b >= 0.0 &&
                    efficiency_b <= 1.0,
                "PairSourceSpec: efficiencies must lie in [0, 1]");
        require(std::isfinite(jitter_sigma) && jitter_sigma >= 0.0,
                "PairSourceSpec: bad jitter sigma");
        require(std::isfinite(dark_rate_a) && dark_rate_a >= 0.0 && std::isfinite(dark_rate_b) &&
                    dark_rate_b >= 0.0,
                "PairSourceSpec: bad dark rate");
    }
};

struct CoincidenceResult {
    std::array<std::array<std::int64_t, 2>, 2> counts;  // [channelA][channelB]
    std::array<std::int64_t, 2> singles_a;              // per channel, whole stream
    std::array<std::int64_t, 2> singles_b;
    double accidentals_estimate;  // 2*window*R_A*R_B*span
    double window;                // seconds

    std::int64_t total() const {
        return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    }
};

namespace detail {

inline void append_sorted_stream(std::vector<TagEvent>& events) {
    std::sort(events.begin(), events.end(),
              [](const TagEvent& x, const TagEvent& y) { return x.timestamp < y.timestamp; });
    // Exact timestamp ties are measure-zero but would violate the stream
    // invariant; nudge the later event by one ulp.
    for (std::size_t k = 1; k < events.size(); ++k)
        if (events[k].timestamp <= events[k - 1].timestamp)
            events[k].timestamp =
                std::nextafter(events[k - 1].timestamp, std::numeric_limits<double>::infinity());
}

// Homogeneous Poisson arrivals on [0, duration): exponential gaps, one
// counter per event, channel drawn from slot 8.
inline void add_dark_counts(std::vector<TagEvent>& events, const RandomStream& rs, double rate,
                            double duration) {
    if (rate <= 0.0) return;
    double t = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        t += rs.exponential(k, rate);
        if (t >= duration) break;
        events.push_back({t, rs.uniform(k, 8) < 0.5 ? 0 : 1});
    }
}

}  // namespace detail

// Simulate the two stations for `duration` seconds. Pair emissions are
// Poissonian at src.pair_rate; each photon independently survives with its
// arm's efficiency; the channel pair of emission k is the Born draw for shot
// k (shared with sample(), same seed); each surviving event gets Gaussian
// time jitter; dark counts land independently on each arm.
inline std::pair<TagStream, TagStream> generate_streams(const TwoPhotonState& s,
                                                        const AnalyzerSetting& a,
                                                        const AnalyzerSetting& b,
                                                        const PairSourceSpec& src, double duration,
                                                        std::uint64_t seed) {
    require(std::isfinite(duration) && duration > 0.0, "generate_streams: duration must be > 0");
    src.validate();
    const JointDistribution dist = joint_distribution(s, a, b);

    const RandomStream born{seed, kStreamBorn};
    const RandomStream emit{seed, kStreamEmit};
    const RandomStream loss_a{seed, kStreamLossA};
    const RandomStream loss_b{seed, kStreamLossB};
    const RandomStream jitter_a{seed, kStreamJitterA};
    const RandomStream jitter_b{seed, kStreamJitterB};

    std::vector<TagEvent> events_a, events_b;
    if (src.pair_rate > 0.0) {
        double t = 0.0;
        for (std::uint64_t k = 0;; ++k) {
            t += emit.exponential(k, src.pair_rate);
            if (t >= duration) break;
            const auto [i, j] = detail::born_outcome(dist, born.uniform(k));
            if (loss_a.uniform(k) < src.efficiency_a) {
                const double jit = src.jitter_sigma > 0.0
                                       ? src.jitter_sigma * jitter_a.gaussian(k)
                                       : 0.0;
                events_a.push_back({t + jit, i});
            }
            if (loss_b.uniform(k) < src.efficiency_b) {
                const double jit = src.jitter_sigma > 0.0
                                       ? src.jitter_sigma * jitter_b.gaussian(k)
                                       : 0.0;
                events_b.push_back({t + jit, j});
            }
        }
    }
    detail::add_dark_counts(events_a, RandomStream{seed, kStreamDarkA}, src.dark_rate_a, duration);
    detail::add_dark_counts(events_b, RandomStream{seed, kStreamDarkB}, src.dark_rate_b, duration);
    detail::append_sorted_stream(events_a);
    detail::append_sorted_stream(events_b);
    return {TagStream{Arm::A, std::move(events_a)}, TagStream{Arm::B, std::move(events_b)}};
}

// Greedy two-pointer merge: an A event and a B event coincide iff
// |tA - tB| <= window and neither is already matched, earliest pair first.
// Linear time; each event participates in at most one coincidence.
//
// The accidentals estimate is the textbook 2*tau*R_A*R_B formula with the
// singles rates taken over the observed span (the operation is not told the
// acquisition duration).
inline CoincidenceResult match_coincidences(const TagStream& sa, const TagStream& sb,
                                            double window) {
    require(std::isfinite(window) && window > 0.0, "match_coincidences: window must be > 0");
    require(sa.station() == Arm::A && sb.station() == Arm::B,
            "match_coincidences: pass the station-A stream first, station-B second");
    const auto& ea = sa.events();
    const auto& eb = sb.events();

    CoincidenceResult result{};
    result.window = window;
    for (const auto& e : ea) ++result.singles_a[e.channel];
    for (const auto& e : eb) ++result.singles_b[e.channel];

    std::size_t i = 0, j = 0;
    while (i < ea.size() && j < eb.size()) {
        const double dt = ea[i].timestamp - eb[j].timestamp;
        if (std::abs(dt) <= window) {
            ++result.counts[ea[i].channel][eb[j].channel];
            ++i;
            ++j;
        } else if (dt < 0.0) {
            ++i;
        } else {
            ++j;
        }
    }

    result.accidentals_estimate = 0.0;
    if (!ea.empty() && !eb.empty()) {
        const double t0 = std::min(ea.front().timestamp, eb.front().timestamp);
        const double t1 = std::max(ea.back().timestamp, eb.back().timestamp);
        const double span = t1 - t0;
        if (span > 0.0) {
            const double na = static_cast<double>(ea.size());
            const double nb = static_cast<double>(eb.size());
            result.accidentals_estimate = 2.0 * window * na * nb / span;
        }
    }
    return result;
}

struct CoincidenceStats {
    std::array<std::array<double, 2>, 2> freq;     // counts / total
    std::array<std::array<double, 2>, 2> freq_se;  // binomial standard errors
    double correlation;                            // (n00+n11-n01-n10) / total
    double correlation_se;
    std::int64_t total;
};

// Frequencies, correlation estimate, and binomial standard errors from a
// coincidence table. SE(E) = 2*sqrt(q(1-q)/N), q the same-outcome fraction.
inline CoincidenceStats estimate_statistics(const CoincidenceResult& r) {
    const std::int64_t total = r.total();
    if (total == 0) throw EmptyResultError{"estimate_statistics: no coincidences recorded"};
    const double n = static_cast<double>(total);

    CoincidenceStats stats{};
    stats.total = total;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double f = static_cast<double>(r.counts[i][j]) / n;
            stats.freq[i][j] = f;
            stats.freq_se[i][j] = std::sqrt(f * (1.0 - f) / n);
        }
    const double q = stats.freq[0][0] + stats.freq[1][1];
    stats.correlation = 2.0 * q - 1.0;
    stats.correlation_se = 2.0 * std::sqrt(q * (1.0 - q) / n);
    return stats;
}

// CSV tag-stream format: one header line "# station=A" or "# station=B",
// then one "timestamp,channel" line per event. Timestamps use shortest
// round-trip formatting, so write -> read is bit-exact.

inline void write_tag_stream(std::ostream& os, const TagStream& stream) {
    os << "# station=" << arm_name(stream.station()) << '\n';
    char buf[64];
    for (const auto& e : stream.events()) {
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.timestamp);
        os.write(buf, end - buf);
        os << ',' << e.channel << '\n';
    }
}

inline TagStream read_tag_stream(std::istream& is) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "read_tag_stream: empty input");
    Arm station;
    if (line == "# station=A")
        station = Arm::A;
    else if (line == "# station=B")
        station = Arm::B;
    else
        throw ContractViolation("read_tag_stream: bad header line: " + line);

    std::vector<TagEvent> events;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        require(comma != std::string::npos, "read_tag_stream: missing comma: " + line);
        TagEvent e{};
        const char* begin = line.data();
        auto [p, ec] = std::from_chars(begin, begin + comma, e.timestamp);
        require(ec == std::errc{} && p == begin + comma,
                "read_tag_stream: bad timestamp: " + line);
        const std::string chan = line.substr(comma + 1);
        require(chan == "0" || chan == "1", "read_tag_stream: bad channel: " + line);
        e.channel = chan == "1" ? 1 : 0;
        events.push_back(e);
    }
    return {station, std::move(events)};
}

}  // namespace entsim
