#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "taxel/errors.hpp"
#include "taxel/physics.hpp"

namespace taxel {

enum class Channel : std::uint8_t { C1 = 0, C2 = 1, C3 = 2, C4 = 3, Self = 4 };

inline std::string_view channel_tag(Channel c) {
    switch (c) {
        case Channel::C1: return "C1";
        case Channel::C2: return "C2";
        case Channel::C3: return "C3";
        case Channel::C4: return "C4";
        case Channel::Self: return "SELF";
    }
    return "?";
}

inline std::optional<Channel> parse_channel_tag(std::string_view s) {
    for (Channel c : {Channel::C1, Channel::C2, Channel::C3, Channel::C4, Channel::Self}) {
        if (s == channel_tag(c)) {
            return c;
        }
    }
    return std::nullopt;
}

inline bool is_mutual(Channel c) { return c != Channel::Self; }

/// Capacitance-to-digital converter settings. The defaults are plausible for
/// a 24-bit CDC behind a 4:1 multiplexer; they are configuration, not
/// measured properties of the prototype.
struct CdcConfig {
    double lsb_ff = 1.0;
    double sample_period_s = 0.011;
    double full_scale_pf = 100.0;

    bool operator==(const CdcConfig&) const = default;

    void validate() const {
        if (!(lsb_ff > 0.0 && sample_period_s > 0.0 && full_scale_pf > 0.0)) {
            throw ValidationError("CDC lsb, sample period and full scale must be positive");
        }
    }

    double lsb_pf() const { return lsb_ff * 1e-3; }
};

/// Code for a capacitance; throws SaturationError at or above full scale.
inline std::int64_t quantize(double value_pf, const CdcConfig& cdc) {
    if (!(value_pf >= 0.0)) {
        throw DomainError("converter input must be >= 0 pF");
    }
    if (value_pf >= cdc.full_scale_pf) {
        throw SaturationError("converter input " + std::to_string(value_pf) +
                              " pF at or above full scale");
    }
    return std::llround(value_pf / cdc.lsb_pf());
}

inline double dequantize(std::int64_t code, const CdcConfig& cdc) {
    return static_cast<double>(code) * cdc.lsb_pf();
}

/// Channel order within one multiplexer cycle.
///
/// SELF switches the top conductor plane from ground to the self-capacitance
/// converter, so it is only legal with the ground plane fitted. It is read on
/// every `self_every`-th cycle.
struct MuxSchedule {
    std::vector<Channel> channels{Channel::C1, Channel::C2, Channel::C3, Channel::C4};
    bool ground_plane = false;
    unsigned self_every = 1;
    double ground_plane_leakage = 0.0;  // 0 = ideal shield

    bool operator==(const MuxSchedule&) const = default;

    static MuxSchedule mutual_only() { return {}; }

    static MuxSchedule with_self(unsigned every = 1) {
        MuxSchedule s;
        s.channels.push_back(Channel::Self);
        s.ground_plane = true;
        s.self_every = every;
        return s;
    }

    bool has_self() const {
        return std::find(channels.begin(), channels.end(), Channel::Self) != channels.end();
    }

    void validate() const {
        for (Channel c : {Channel::C1, Channel::C2, Channel::C3, Channel::C4}) {
            if (std::find(channels.begin(), channels.end(), c) == channels.end()) {
                throw ValidationError("schedule must read every mutual channel each cycle");
            }
        }
        if (has_self() && !ground_plane) {
            throw ValidationError("SELF channel requires the ground-plane configuration");
        }
        if (self_every == 0) {
            throw ValidationError("self_every must be >= 1");
        }
        if (!(ground_plane_leakage >= 0.0 && ground_plane_leakage <= 1.0)) {
            throw ValidationError("ground-plane leakage must lie in [0, 1]");
        }
    }

    double cycle_duration(const CdcConfig& cdc) const {
        return static_cast<double>(channels.size()) * cdc.sample_period_s;
    }
};

/// One converted sample as it appears on the line protocol. Time is held in
/// microseconds and the engineering value in micro-picofarads so that the
/// six-decimal text form is exact.
struct FrameRecord {
    std::int64_t t_us = 0;
    Channel tag = Channel::C1;
    std::int64_t code = 0;
    std::int64_t value_upf = 0;

    bool operator==(const FrameRecord&) const = default;

    double t_s() const { return static_cast<double>(t_us) * 1e-6; }
    double value_pf() const { return static_cast<double>(value_upf) * 1e-6; }

    static FrameRecord make(double t_s, Channel tag, std::int64_t code, double value_pf) {
        return {std::llround(t_s * 1e6), tag, code, std::llround(value_pf * 1e6)};
    }
};

namespace detail {

inline void append_fixed6(std::string& out, std::int64_t micro) {
    if (micro < 0) {
        out += '-';
        micro = -micro;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(micro / 1000000),
                  static_cast<long long>(micro % 1000000));
    out += buf;
}

// Parses "[-]digits[.digits]" with at most six fractional digits into millionths.
inline std::optional<std::int64_t> parse_fixed6(std::string_view s) {
    bool neg = false;
    if (!s.empty() && s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() || frac.size() > 6 || (dot != std::string_view::npos && frac.empty())) {
        return std::nullopt;
    }
    auto digits = [](std::string_view d) {
        return std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits(whole) || !digits(frac)) {
        return std::nullopt;
    }
    std::int64_t w = 0;
    if (auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w); ec != std::errc{}) {
        return std::nullopt;
    }
    std::int64_t f = 0;
    if (!frac.empty()) {
        std::from_chars(frac.data(), frac.data() + frac.size(), f);
        for (std::size_t i = frac.size(); i < 6; ++i) {
            f *= 10;
        }
    }
    if (w > (INT64_MAX - f) / 1000000) {
        return std::nullopt;
    }
    const std::int64_t v = w * 1000000 + f;
    return neg ? -v : v;
}

}  // namespace detail

/// "t,tag,code,value" with t and value as fixed six-decimal numbers.
inline std::string serialize_frame(const FrameRecord& r) {
    std::string out;
    detail::append_fixed6(out, r.t_us);
    out += ',';
    out += channel_tag(r.tag);
    out += ',';
    out += std::to_string(r.code);
    out += ',';
    detail::append_fixed6(out, r.value_upf);
    return out;
}

inline FrameRecord parse_frame(std::string_view line, std::size_t line_no = 1) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        f.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (f.size() != 4) {
        throw FrameParseError(line_no, "record", "expected 4 comma-separated fields, got " +
                                                     std::to_string(f.size()));
    }
    FrameRecord r;
    const auto t = detail::parse_fixed6(f[0]);
    if (!t) {
        throw FrameParseError(line_no, "t", "'" + std::string(f[0]) + "'");
    }
    r.t_us = *t;
    const auto tag = parse_channel_tag(f[1]);
    if (!tag) {
        throw FrameParseError(line_no, "tag", "'" + std::string(f[1]) + "'");
    }
    r.tag = *tag;
    const auto code_text = f[2];
    const auto [p, ec] = std::from_chars(code_text.data(), code_text.data() + code_text.size(), r.code);
    if (ec != std::errc{} || p != code_text.data() + code_text.size() || code_text.empty()) {
        throw FrameParseError(line_no, "code", "'" + std::string(code_text) + "'");
    }
    const auto v = detail::parse_fixed6(f[3]);
    if (!v) {
        throw FrameParseError(line_no, "value", "'" + std::string(f[3]) + "'");
    }
    r.value_upf = *v;
    return r;
}

inline void write_frames(std::ostream& os, const std::vector<FrameRecord>& records) {
    for (const auto& r : records) {
        os << serialize_frame(r) << '\n';
    }
}

/// Reads records, skipping blank lines and '#' comments.
inline std::vector<FrameRecord> read_frames(std::istream& is) {
    std::vector<FrameRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty() || line == "\r" || line.front() == '#') {
            continue;
        }
        out.push_back(parse_frame(line, n));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Acquisition

/// What the taxel experiences at one instant.
struct WorldSample {
    DeformationState deformation{};
    ProximityStimulus proximity{};
};

template <class F>
concept WorldFunction = std::invocable<F&, double> &&
                        std::convertible_to<std::invoke_result_t<F&, double>, WorldSample>;

struct CycleResult {
    std::vector<FrameRecord> records;
    CapacitanceFrame mutual;                 // assembled from the latest C1..C4 records
    std::optional<CapacitanceFrame> self;    // present when SELF was read this cycle
    bool saturated = false;
};

/// Runs one multiplexer cycle starting at `t0`. Channel k is sampled at
/// t0 + k * sample_period against the world state at that instant, so a
/// moving stimulus is seen at different times by different channels.
///
/// With the ground plane fitted the mutual channels only see
/// `ground_plane_leakage` of the proximity response. Values at or above full
/// scale are clamped to the last code and flagged.
template <WorldFunction World>
CycleResult run_cycle(const MuxSchedule& schedule, const CdcConfig& cdc, const SensorModel& sensor,
                      World&& world, NoiseStream& noise, double t0, std::uint64_t cycle_index = 0) {
    schedule.validate();
    cdc.validate();
    CycleResult out;
    Quad assembled{};
    double first_t = t0;
    bool first = true;
    const std::int64_t max_code = std::llround(cdc.full_scale_pf / cdc.lsb_pf()) - 1;

    for (std::size_t k = 0; k < schedule.channels.size(); ++k) {
        const Channel ch = schedule.channels[k];
        if (ch == Channel::Self && cycle_index % schedule.self_every != 0) {
            continue;
        }
        const double t = t0 + static_cast<double>(k) * cdc.sample_period_s;
        const WorldSample w = world(t);
        double value = 0.0;
        if (ch == Channel::Self) {
            value = self_capacitance(w.proximity, sensor.self_cap);
        } else {
            double factor = proximity_factor(w.proximity, sensor.proximity);
            if (schedule.ground_plane) {
                factor = 1.0 - schedule.ground_plane_leakage * (1.0 - factor);
            }
            value = mutual_capacitances(sensor, w.deformation, factor)[static_cast<std::size_t>(ch)];
        }
        value += noise.next();
        std::int64_t code = 0;
        if (value >= cdc.full_scale_pf) {
            code = max_code;
            out.saturated = true;
        } else {
            code = quantize(std::max(value, 0.0), cdc);
        }
        const FrameRecord rec = FrameRecord::make(t, ch, code, dequantize(code, cdc));
        if (first) {
            first_t = rec.t_s();
            first = false;
        }
        if (ch == Channel::Self) {
            out.self = CapacitanceFrame::self(rec.t_s(), rec.value_pf());
        } else {
            assembled[static_cast<std::size_t>(ch)] = rec.value_pf();
        }
        out.records.push_back(rec);
    }
    out.mutual = CapacitanceFrame::mutual(first_t, assembled);
    return out;
}

/// Groups a record stream into mutual frames (one per complete C1..C4 set)
/// and tracks the most recent SELF value for each frame.
struct AssembledFrame {
    CapacitanceFrame mutual;
    std::optional<double> latest_self_pf;
};

/// Incremental form of `assemble_frames` for streamed input.
class FrameAssembler {
public:
    /// Returns a frame when `r` completes a C1..C4 set.
    std::optional<AssembledFrame> push(const FrameRecord& r) {
        if (r.tag == Channel::Self) {
            self_ = r.value_pf();
            return std::nullopt;
        }
        const auto i = static_cast<std::size_t>(r.tag);
        if (seen_[i]) {
            throw ValidationError("channel " + std::string(channel_tag(r.tag)) +
                                  " repeated before the frame was complete");
        }
        if (!first_t_) {
            first_t_ = r.t_us;
        }
        c_[i] = r.value_pf();
        seen_[i] = true;
        if (!(seen_[0] && seen_[1] && seen_[2] && seen_[3])) {
            return std::nullopt;
        }
        AssembledFrame f{CapacitanceFrame::mutual(static_cast<double>(*first_t_) * 1e-6, c_), self_};
        seen_ = {};
        first_t_.reset();
        return f;
    }

    bool pending() const { return seen_[0] || seen_[1] || seen_[2] || seen_[3]; }

private:
    Quad c_{};
    std::array<bool, 4> seen_{};
    std::optional<std::int64_t> first_t_;
    std::optional<double> self_;
};

inline std::vector<AssembledFrame> assemble_frames(const std::vector<FrameRecord>& records) {
    std::vector<AssembledFrame> out;
    FrameAssembler a;
    for (const auto& r : records) {
        if (auto f = a.push(r)) {
            out.push_back(*f);
        }
    }
    return out;
}

}  // namespace taxel
