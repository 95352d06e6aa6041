#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "taxel/readout.hpp"

using namespace taxel;

namespace {

WorldSample rest_world(double) { return {}; }

}  // namespace

TEST(Quantize, MatchesNearestCode) {
    const CdcConfig cdc;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> v(0.0, 99.9);
    for (int i = 0; i < 20000; ++i) {
        const double x = v(rng);
        EXPECT_EQ(quantize(x, cdc), oracle::nearest_code(x, 1e-3)) << x;
    }
    EXPECT_EQ(quantize(0.0, cdc), 0);
    EXPECT_EQ(quantize(12.2224, cdc), 12222);
    EXPECT_EQ(quantize(12.2226, cdc), 12223);
}

TEST(Quantize, ErrorIsHalfAnLsb) {
    CdcConfig cdc;
    cdc.lsb_ff = 7.0;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> v(0.0, 50.0);
    for (int i = 0; i < 5000; ++i) {
        const double x = v(rng);
        EXPECT_LE(std::abs(dequantize(quantize(x, cdc), cdc) - x), 0.5 * cdc.lsb_pf() + 1e-12);
    }
}

TEST(Quantize, RangeErrors) {
    const CdcConfig cdc;
    EXPECT_THROW(quantize(-0.001, cdc), DomainError);
    EXPECT_THROW(quantize(100.0, cdc), SaturationError);
    EXPECT_NO_THROW(quantize(99.999, cdc));
    CdcConfig bad;
    bad.lsb_ff = 0.0;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(FrameProtocol, SerializesFixedSixDecimals) {
    EXPECT_EQ(serialize_frame(FrameRecord::make(1.0, Channel::C3, 12222, 12.222)), "1.000000,C3,12222,12.222000");
    EXPECT_EQ(serialize_frame(FrameRecord::make(0.011, Channel::Self, 6000, 6.0)), "0.011000,SELF,6000,6.000000");
    EXPECT_EQ(serialize_frame(FrameRecord::make(-0.044, Channel::C1, 0, 0.0)), "-0.044000,C1,0,0.000000");
}

TEST(FrameProtocol, ParseInvertsSerializeExactly) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> t(-1'000'000'000, 1'000'000'000'000);
    std::uniform_int_distribution<std::int64_t> code(0, 100'000'000);
    std::uniform_int_distribution<int> tag(0, 4);
    for (int i = 0; i < 20000; ++i) {
        FrameRecord r;
        r.t_us = t(rng);
        r.tag = static_cast<Channel>(tag(rng));
        r.code = code(rng);
        r.value_upf = r.code * 1000;
        const std::string line = serialize_frame(r);
        EXPECT_EQ(parse_frame(line), r) << line;
        EXPECT_EQ(oracle::fixed6(r.t_s()), line.substr(0, line.find(',')));
    }
}

TEST(FrameProtocol, ParseErrorsNameFieldAndLine) {
    auto field_of = [](const std::string& line) -> std::string {
        try {
            parse_frame(line, 7);
        } catch (const FrameParseError& e) {
            EXPECT_EQ(e.line(), 7u);
            EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
            return e.field();
        }
        return "";
    };
    EXPECT_EQ(field_of("1.000000,CX,1,0.001000"), "tag");
    EXPECT_EQ(field_of("abc,C1,1,0.001000"), "t");
    EXPECT_EQ(field_of("1.000000,C1,1.5,0.001000"), "code");
    EXPECT_EQ(field_of("1.000000,C1,1,"), "value");
    EXPECT_EQ(field_of("1.000000,C1,1"), "record");
    EXPECT_EQ(field_of("1.000000,C1,1,0.001,9"), "record");
}

TEST(FrameProtocol, StreamSkipsCommentsAndCountsLines) {
    std::stringstream ss("# header\n\n0.000000,C1,1,0.001000\r\n0.011000,C9,1,0.001000\n");
    try {
        read_frames(ss);
        FAIL();
    } catch (const FrameParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
    std::stringstream ok("# header\n0.000000,C1,1,0.001000\r\n");
    EXPECT_EQ(read_frames(ok).size(), 1u);
}

TEST(Mux, SelfRequiresGroundPlane) {
    MuxSchedule s = MuxSchedule::with_self();
    s.ground_plane = false;
    EXPECT_THROW(s.validate(), ValidationError);
    MuxSchedule missing;
    missing.channels = {Channel::C1, Channel::C2, Channel::C3};
    EXPECT_THROW(missing.validate(), ValidationError);
    EXPECT_DOUBLE_EQ(MuxSchedule::mutual_only().cycle_duration(CdcConfig{}), 0.044);
    EXPECT_DOUBLE_EQ(MuxSchedule::with_self().cycle_duration(CdcConfig{}), 0.055);
}

TEST(Mux, ChannelsAreSampledAtTheirOwnInstants) {
    const SensorModel sensor;
    NoiseStream noise(NoiseModel{});
    std::vector<double> seen;
    auto world = [&](double t) {
        seen.push_back(t);
        return WorldSample{};
    };
    const auto r = run_cycle(MuxSchedule::with_self(), CdcConfig{}, sensor, world, noise, 2.0);
    ASSERT_EQ(r.records.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(seen[k], 2.0 + 0.011 * static_cast<double>(k), 1e-12);
        EXPECT_EQ(r.records[k].t_us, 2'000'000 + 11'000 * static_cast<std::int64_t>(k));
    }
    EXPECT_EQ(r.records[4].tag, Channel::Self);
    ASSERT_TRUE(r.self.has_value());
    EXPECT_NEAR((*r.self->self_cap_pf), 6.0, 1e-3);
    for (double c : r.mutual.c_pf) {
        EXPECT_NEAR(c, 10.0, 1e-3);
    }
}

TEST(Mux, SelfEveryNthCycle) {
    const SensorModel sensor;
    NoiseStream noise(NoiseModel{});
    const auto s = MuxSchedule::with_self(3);
    EXPECT_TRUE(run_cycle(s, CdcConfig{}, sensor, rest_world, noise, 0.0, 0).self.has_value());
    EXPECT_FALSE(run_cycle(s, CdcConfig{}, sensor, rest_world, noise, 0.0, 1).self.has_value());
    EXPECT_FALSE(run_cycle(s, CdcConfig{}, sensor, rest_world, noise, 0.0, 2).self.has_value());
    EXPECT_TRUE(run_cycle(s, CdcConfig{}, sensor, rest_world, noise, 0.0, 3).self.has_value());
}

TEST(Mux, GroundPlaneBlocksProximityOnMutualChannels) {
    const SensorModel sensor;
    NoiseStream noise(NoiseModel{});
    auto finger = [](double) {
        WorldSample w;
        w.proximity = ProximityStimulus::finger(0.0);
        return w;
    };
    const auto open = run_cycle(MuxSchedule::mutual_only(), CdcConfig{}, sensor, finger, noise, 0.0);
    const auto shielded = run_cycle(MuxSchedule::with_self(), CdcConfig{}, sensor, finger, noise, 0.0);
    EXPECT_NEAR(open.mutual.c_pf[0], 10.0 * (1.0 - 0.147), 1e-3);
    EXPECT_NEAR(shielded.mutual.c_pf[0], 10.0, 1e-3);
    EXPECT_NEAR((*shielded.self->self_cap_pf), 7.2, 1e-3);
    auto leaky = MuxSchedule::with_self();
    leaky.ground_plane_leakage = 0.5;
    const auto half = run_cycle(leaky, CdcConfig{}, sensor, finger, noise, 0.0);
    EXPECT_NEAR(half.mutual.c_pf[0], 10.0 * (1.0 - 0.5 * 0.147), 1e-3);
}

TEST(Mux, SaturationClampsAndFlags) {
    SensorModel sensor;
    CdcConfig cdc;
    cdc.full_scale_pf = 10.5;
    NoiseStream noise(NoiseModel{});
    auto pressed = [](double) {
        WorldSample w;
        w.deformation.eta_mm = 0.3;
        return w;
    };
    const auto r = run_cycle(MuxSchedule::mutual_only(), cdc, sensor, pressed, noise, 0.0);
    EXPECT_TRUE(r.saturated);
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.code, 10499);
    }
}

TEST(Assembler, GroupsCompleteSetsAndCarriesSelf) {
    std::vector<FrameRecord> recs;
    for (int cyc = 0; cyc < 3; ++cyc) {
        for (int k = 0; k < 4; ++k) {
            recs.push_back(FrameRecord::make(0.044 * cyc + 0.011 * k, static_cast<Channel>(k), 1000 + k, 1.0 + k));
        }
        if (cyc == 1) {
            recs.push_back(FrameRecord::make(0.044 * cyc + 0.04, Channel::Self, 6000, 6.0));
        }
    }
    const auto frames = assemble_frames(recs);
    ASSERT_EQ(frames.size(), 3u);
    EXPECT_NEAR(frames[1].mutual.t_s, 0.044, 1e-12);
    EXPECT_EQ(frames[1].mutual.c_pf[2], 3.0);
    EXPECT_FALSE(frames[0].latest_self_pf.has_value());
    EXPECT_FALSE(frames[1].latest_self_pf.has_value());
    ASSERT_TRUE(frames[2].latest_self_pf.has_value());
    EXPECT_EQ(*frames[2].latest_self_pf, 6.0);
}

TEST(Assembler, RepeatedChannelIsAnError) {
    FrameAssembler a;
    EXPECT_FALSE(a.push(FrameRecord::make(0, Channel::C1, 1, 0.001)));
    EXPECT_TRUE(a.pending());
    EXPECT_THROW(a.push(FrameRecord::make(0.011, Channel::C1, 1, 0.001)), ValidationError);
}
