#include <gtest/gtest.h>

#include <sstream>

#include "taxel/taxel.hpp"

using namespace taxel;
using nlohmann::json;

namespace {

Keyframe at(double t) {
    Keyframe k;
    k.t_s = t;
    return k;
}

std::string error_of(const json& j) {
    try {
        scenario_from_json(j);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

std::size_t count_fields(const std::string& row) {
    return static_cast<std::size_t>(std::count(row.begin(), row.end(), ',')) + 1;
}

}  // namespace

TEST(Scenario, StimulusChannels) {
    EXPECT_EQ(find_builtin("approach_touch").stimulus_channels(),
              (std::vector<std::string>{"normal", "proximity"}));
    EXPECT_EQ(find_builtin("shear_py").stimulus_channels(), (std::vector<std::string>{"shear_y"}));
    EXPECT_EQ(find_builtin("strawberry").stimulus_channels(),
              (std::vector<std::string>{"normal", "shear_x", "shear_y"}));
    EXPECT_TRUE(find_builtin("idle").stimulus_channels().empty());
    EXPECT_THROW(find_builtin("nope"), ValidationError);
}

TEST(Scenario, KeyframeErrorsNameTheKeyframe) {
    Scenario sc;
    sc.name = "k";
    sc.keyframes = {at(0), at(1)};
    sc.keyframes[1].eta_mm = 1.5;
    try {
        sc.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("keyframe 1"), std::string::npos) << e.what();
    }
    sc.keyframes[1].eta_mm = 0.2;
    sc.keyframes[1].normal_force_n = 0.5;
    EXPECT_THROW(sc.validate(), ValidationError);
    sc.keyframes[1].normal_force_n.reset();
    sc.keyframes[1].t_s = 0.0;
    EXPECT_THROW(sc.validate(), ValidationError);
    sc.keyframes.clear();
    EXPECT_THROW(sc.validate(), ValidationError);
}

TEST(Scenario, InterpolationModes) {
    Scenario sc;
    sc.keyframes = {at(0), at(1)};
    sc.keyframes[0].eta_mm = 0.0;
    sc.keyframes[0].distance_mm = 10.0;
    sc.keyframes[1].eta_mm = 0.2;
    const auto ks = resolve_keyframes(sc);
    EXPECT_NEAR(interpolate(ks, Interpolation::Linear, 0.25).normal, 0.05, 1e-15);
    EXPECT_EQ(interpolate(ks, Interpolation::Step, 0.99).normal, 0.0);
    EXPECT_EQ(interpolate(ks, Interpolation::Linear, 0.5).distance_mm, 10.0);
    EXPECT_EQ(interpolate(ks, Interpolation::Linear, 5.0).normal, 0.2);
}

TEST(ScenarioJson, BuiltinsRoundTrip) {
    for (const auto& sc : builtin_scenarios()) {
        const json j = scenario_to_json(sc);
        EXPECT_EQ(scenario_from_json(json::parse(j.dump())), sc) << sc.name;
    }
}

TEST(ScenarioJson, MinimalDocumentUsesDefaults) {
    const json j = json::parse(R"({"name":"m","keyframes":[{"t":0},{"t":1,"normal_force_n":0.5}]})");
    const Scenario sc = scenario_from_json(j);
    EXPECT_EQ(sc.config, ScenarioConfig{});
    EXPECT_EQ(sc.keyframes.size(), 2u);
    EXPECT_EQ(sc.keyframes[1].normal_force_n, 0.5);
}

TEST(ScenarioJson, PresetsResolve) {
    const json j = json::parse(R"({"name":"p","config":{"material":"paper_line_fit",
        "proximity":"light_contact","parasitics":"shielded"},"keyframes":[{"t":0}]})");
    const Scenario sc = scenario_from_json(j);
    EXPECT_EQ(sc.config.sensor.material, paper_material(TaxelGeometry{}, SensitivityTarget::line_fit()));
    EXPECT_EQ(sc.config.sensor.proximity, ProximityParams::light_contact());
    EXPECT_EQ(sc.config.sensor.parasitics, ParasiticModel::shielded_preset());
}

TEST(ScenarioJson, SchemaErrorsCarryAPointer) {
    const std::string unknown = error_of(json::parse(R"({"name":"x","keyframes":[{"t":0,"tt":1}]})"));
    EXPECT_NE(unknown.find("/keyframes/0"), std::string::npos) << unknown;
    EXPECT_NE(unknown.find("tt"), std::string::npos) << unknown;
    const std::string type = error_of(json::parse(R"({"name":"x","keyframes":[{"t":"zero"}]})"));
    EXPECT_NE(type.find("/keyframes/0/t"), std::string::npos) << type;
    const std::string preset = error_of(json::parse(
        R"({"name":"x","config":{"material":"rubber"},"keyframes":[{"t":0}]})"));
    EXPECT_NE(preset.find("/config/material"), std::string::npos) << preset;
    EXPECT_NE(error_of(json::parse(R"({"name":"x"})")), "");
    EXPECT_NE(error_of(json::parse(R"([1,2])")), "");
}

TEST(Run, IsDeterministic) {
    const auto sc = find_builtin("strawberry");
    EXPECT_EQ(report_to_json(run(sc)).dump(), report_to_json(run(sc)).dump());
    auto other = sc;
    other.config.noise.seed = 43;
    EXPECT_NE(report_to_json(run(sc)).dump(), report_to_json(run(other)).dump());
}

TEST(Run, StepsCoverTheTimeline) {
    const auto rep = run(find_builtin("idle"));
    EXPECT_NEAR(rep.step_dt_s, 0.044, 1e-15);
    ASSERT_EQ(rep.steps.size(), 23u);
    EXPECT_NEAR(rep.baseline.t_s, -0.044, 1e-12);
    EXPECT_NEAR(rep.steps.back().t_s, 22 * 0.044, 1e-9);
    EXPECT_THROW(run(find_builtin("idle"), 0.01), ValidationError);
    EXPECT_EQ(run(find_builtin("idle"), 0.1).steps.size(), 11u);
}

TEST(Run, IdleStaysAtTheNoiseFloor) {
    const auto rep = run(find_builtin("idle"));
    for (const auto& s : rep.steps) {
        EXPECT_LT(std::abs(s.decoded.shear_x_mm), 0.005);
        EXPECT_LT(std::abs(s.decoded.shear_y_mm), 0.005);
        EXPECT_LT(std::abs(s.decoded.normal_strain), 0.002);
        EXPECT_EQ(s.decoded.stimulus.kind, StimulusKind::Idle);
    }
}

TEST(Run, PressPlateauMatchesTheLoad) {
    const auto rep = run(find_builtin("press_5kPa"));
    for (const auto& s : rep.steps) {
        if (s.t_s > 1.1) {
            EXPECT_NEAR(s.decoded.pressure_kpa, 5.0, 0.25) << s.t_s;
            EXPECT_EQ(s.decoded.stimulus.kind, StimulusKind::Pressure);
        }
    }
}

TEST(Run, BuiltinsEndInTheirRow) {
    const std::vector<std::pair<std::string, std::string>> want{
        {"idle", "Idle"},         {"light_touch", "LightTouch"}, {"press_5kPa", "Pressure"},
        {"shear_px", "ShearPX"}, {"shear_nx", "ShearNX"},       {"shear_py", "ShearPY"},
        {"shear_ny", "ShearNY"}, {"strawberry", "Idle"}};
    for (const auto& [name, cls] : want) {
        const auto rep = run(find_builtin(name));
        EXPECT_EQ(rep.summary.class_sequence.back(), cls) << name;
    }
}

TEST(Run, ApproachTouchSequence) {
    const auto rep = run(find_builtin("approach_touch"));
    const auto& seq = rep.summary.class_sequence;
    ASSERT_GE(seq.size(), 3u);
    EXPECT_EQ(seq.front(), "Idle");
    EXPECT_NE(std::find(seq.begin(), seq.end(), "Proximity"), seq.end());
    EXPECT_NE(std::find(seq.begin(), seq.end(), "LightTouch"), seq.end());
}

TEST(Run, GroundPlaneReadsSelfWithoutAFinger) {
    auto sc = find_builtin("idle");
    sc.config.ground_plane = true;
    const auto rep = run(sc);
    ASSERT_TRUE(rep.baseline_self_pf.has_value());
    EXPECT_NEAR(*rep.baseline_self_pf, 6.0, 0.02);
    EXPECT_NEAR(rep.step_dt_s, 0.055, 1e-15);
    for (const auto& s : rep.steps) {
        ASSERT_TRUE(s.self_cap_pf.has_value());
        EXPECT_EQ(s.decoded.stimulus.kind, StimulusKind::Idle);
    }
}

TEST(Run, RecordsReassembleIntoTheReportedFrames) {
    std::vector<FrameRecord> recs;
    const auto rep = run(find_builtin("shear_px"), 0.0, &recs);
    const auto frames = assemble_frames(recs);
    ASSERT_EQ(frames.size(), rep.steps.size() + 1);
    EXPECT_EQ(frames.front().mutual, rep.baseline);
    for (std::size_t i = 0; i < rep.steps.size(); ++i) {
        EXPECT_EQ(frames[i + 1].mutual, rep.steps[i].frame);
    }
}

TEST(Run, ManyMatchesSequential) {
    const auto all = builtin_scenarios();
    const auto par = run_many(all);
    ASSERT_EQ(par.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(par[i], run(all[i])) << all[i].name;
    }
}

TEST(Export, EmptyReportIsHeaderOnly) {
    std::ostringstream os;
    write_csv(os, RunReport{});
    EXPECT_EQ(os.str(), "t,C1,C2,C3,C4,self_cap,normal_strain,shear_x,shear_y,shear_mag,shear_angle,"
                        "pressure_kPa,shear_N,class\n");
}

TEST(Export, EveryRowHasEveryColumn) {
    auto sc = find_builtin("approach_touch");
    sc.config.ground_plane = true;
    for (const auto& rep : {run(find_builtin("strawberry")), run(sc)}) {
        std::ostringstream os;
        write_csv(os, rep);
        std::istringstream is(os.str());
        std::string line;
        std::size_t n = 0;
        while (std::getline(is, line)) {
            EXPECT_EQ(count_fields(line), kCsvColumns.size()) << line;
            ++n;
        }
        EXPECT_EQ(n, rep.steps.size() + 1);
    }
}

TEST(Export, JsonReimportIsLossless) {
    auto sc = find_builtin("approach_touch");
    sc.config.ground_plane = true;
    for (const auto& rep : {run(find_builtin("strawberry")), run(sc), gripper_demo().report}) {
        EXPECT_EQ(report_from_json(json::parse(report_to_json(rep).dump())), rep);
    }
    EXPECT_THROW(report_from_json(json::parse(R"({"scenario":"x"})")), ValidationError);
}

TEST(Gripper, NoMassNoShear) {
    GripperParams p;
    p.final_mass_g = 1e-9;
    const auto r = gripper_demo(p);
    EXPECT_LT(r.report.summary.max_shear_n, 0.01);
}

TEST(Gripper, ShearTracksTheMass) {
    const auto r = gripper_demo();
    const auto& steps = r.report.steps;
    ASSERT_FALSE(steps.empty());
    for (std::size_t i = 1; i < steps.size(); ++i) {
        EXPECT_GE(steps[i].decoded.shear_force_n, steps[i - 1].decoded.shear_force_n - 1e-12) << i;
    }
    const double final_n = steps.back().decoded.shear_force_n;
    EXPECT_GE(final_n, 0.2);
    EXPECT_LE(final_n, 0.8);
    EXPECT_NEAR(final_n, gripper_tangential_n(80.0), 0.02);
    EXPECT_NEAR(steps.back().decoded.shear_angle_deg, 270.0, 1.0);
    EXPECT_TRUE(r.report.warnings.empty());
    EXPECT_EQ(r.mass_g.back(), 80.0);
}

TEST(Gripper, LowFrictionWarnsOfSlip) {
    GripperParams p;
    p.friction = 0.2;
    const auto r = gripper_demo(p);
    ASSERT_EQ(r.report.warnings.size(), 1u);
    EXPECT_NE(r.report.warnings[0].find("slip"), std::string::npos);
}

TEST(Ambiguity, MutualOnlyCollidesAndSelfResolves) {
    const auto r = ambiguity_demo();
    EXPECT_TRUE(r.collision());
    EXPECT_LT(r.signature_gap_pf(), 0.005);
    EXPECT_TRUE(r.resolved());
    EXPECT_GT(r.press_eta_mm, 0.0);
    EXPECT_LT(r.press_eta_mm, 0.2);
}
