#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "taxel/calibration.hpp"
#include "taxel/physics.hpp"

using namespace taxel;

TEST(Geometry, BaselineIsEpsWTimesOverlapOverGap) {
    TaxelGeometry g;
    EXPECT_DOUBLE_EQ(g.baseline_pf(), 10.0);
    const Quad c = ideal_capacitances(g, DeformationState{});
    for (double v : c) {
        EXPECT_DOUBLE_EQ(v, 10.0);
    }
}

TEST(Geometry, IdealCapacitancesMatchOverlapOracle) {
    TaxelGeometry g;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> eta(0.0, 0.95 * g.gap_mm);
    std::uniform_real_distribution<double> lam(-0.95 * g.overlap_length_mm, 0.95 * g.overlap_length_mm);
    for (int i = 0; i < 2000; ++i) {
        const DeformationState def{eta(rng), lam(rng), lam(rng)};
        const Quad c = ideal_capacitances(g, def);
        const auto want = oracle::overlap_caps(g.eps_w_pf, g.overlap_length_mm, g.gap_mm, def.eta_mm,
                                               def.lambda_x_mm, def.lambda_y_mm);
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_NEAR(c[k], want[k], 1e-12 * want[k]);
        }
    }
}

TEST(Geometry, PreconditionsRejectOutOfRangeDeformation) {
    TaxelGeometry g;
    EXPECT_THROW(ideal_capacitances(g, {1.5, 0, 0}), DomainError);
    EXPECT_THROW(ideal_capacitances(g, {-0.01, 0, 0}), DomainError);
    EXPECT_THROW(ideal_capacitances(g, {0, 1.5, 0}), DomainError);
    EXPECT_THROW(ideal_capacitances(g, {0, 0, -1.5}), DomainError);
    EXPECT_NO_THROW(ideal_capacitances(g, {1.49, 1.49, -1.49}));
}

TEST(Geometry, RemappedAxesMoveTheResponse) {
    TaxelGeometry g;
    g.axes = AxisMap{Electrode::E2, Electrode::E4, Electrode::E3, Electrode::E1};
    const Quad c = ideal_capacitances(g, {0.0, 0.3, 0.0});
    EXPECT_GT(c[index(Electrode::E4)], 10.0);
    EXPECT_LT(c[index(Electrode::E2)], 10.0);
    EXPECT_DOUBLE_EQ(c[index(Electrode::E1)], 10.0);
    AxisMap bad{Electrode::E1, Electrode::E1, Electrode::E2, Electrode::E3};
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Proximity, ShapeIsPinnedAndMonotone) {
    EXPECT_DOUBLE_EQ(proximity_shape(0.0, 15.0, 4.0), 1.0);
    EXPECT_DOUBLE_EQ(proximity_shape(15.0, 15.0, 4.0), 0.0);
    EXPECT_DOUBLE_EQ(proximity_shape(40.0, 15.0, 4.0), 0.0);
    double prev = 2.0;
    for (double z = 0.0; z <= 16.0; z += 0.05) {
        const double f = proximity_shape(z, 15.0, 4.0);
        EXPECT_LE(f, prev);
        prev = f;
    }
    EXPECT_THROW(proximity_shape(-1.0, 15.0, 4.0), DomainError);
}

TEST(Proximity, FingerLowersInsulatorRaises) {
    const ProximityParams p;
    EXPECT_DOUBLE_EQ(proximity_factor(ProximityStimulus::none(), p), 1.0);
    EXPECT_NEAR(proximity_factor(ProximityStimulus::finger(0.0), p), 1.0 - 0.147, 1e-15);
    EXPECT_NEAR(proximity_factor(ProximityStimulus::insulator(0.0), p), 1.03, 1e-15);
    EXPECT_DOUBLE_EQ(proximity_factor(ProximityStimulus::insulator(2.0), p), 1.0);
    EXPECT_NEAR(proximity_factor(ProximityStimulus::finger(0.0), ProximityParams::light_contact()), 0.89, 1e-15);
    ProximityParams bad;
    bad.insulator_rise = 0.05;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(SelfCap, RisesWithGroundedBodyOnly) {
    const SelfCapParams p;
    EXPECT_DOUBLE_EQ(self_capacitance(ProximityStimulus::none(), p), 6.0);
    EXPECT_DOUBLE_EQ(self_capacitance(ProximityStimulus::insulator(0.0), p), 6.0);
    EXPECT_DOUBLE_EQ(self_capacitance(ProximityStimulus::finger(0.0), p), 7.2);
    EXPECT_GT(self_capacitance(ProximityStimulus::finger(3.0), p), 6.0);
}

TEST(Parasitics, PresetsReproduceReportedBaselines) {
    SensorModel s;
    s.parasitics = ParasiticModel::unshielded();
    const Quad rest = mutual_capacitances(s, {}, 1.0);
    EXPECT_DOUBLE_EQ(rest[0], 44.0);
    EXPECT_DOUBLE_EQ(rest[1], 49.0);
    EXPECT_DOUBLE_EQ(rest[2], 49.0);
    EXPECT_DOUBLE_EQ(rest[3], 38.0);
    s.parasitics = ParasiticModel::shielded_preset();
    const Quad shielded = mutual_capacitances(s, {}, 1.0);
    EXPECT_DOUBLE_EQ(shielded[0], 14.0);
    EXPECT_DOUBLE_EQ(shielded[1], 13.0);
    EXPECT_DOUBLE_EQ(shielded[2], 14.0);
    EXPECT_DOUBLE_EQ(shielded[3], 15.0);
    EXPECT_THROW(ParasiticModel::from_baselines({5, 13, 14, 15}, 10.0, true), ValidationError);
}

TEST(Parasitics, OffsetsDoNotChangeAbsoluteResponse) {
    SensorModel clean, stray;
    stray.parasitics = ParasiticModel::unshielded();
    const DeformationState def{0.3, 0.1, -0.2};
    const Quad a0 = mutual_capacitances(clean, {}, 1.0), a1 = mutual_capacitances(clean, def, 1.0);
    const Quad b0 = mutual_capacitances(stray, {}, 1.0), b1 = mutual_capacitances(stray, def, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(a1[i] - a0[i], b1[i] - b0[i], 1e-12);
    }
}

TEST(Crosstalk, LeakIsLinearInOtherAxisDifferential) {
    SensorModel s;
    s.crosstalk = CrosstalkModel::prototype();
    const Quad c = mutual_capacitances(s, {0.0, 0.3, 0.0}, 1.0);
    // x differential = 2 * eps_w * lx / d; half of it times k lands on the y pair.
    const double leak = 0.1 * 10.0 * 0.3 / 1.5;
    EXPECT_NEAR(c[index(Electrode::E2)] - 10.0, leak, 1e-12);
    EXPECT_NEAR(c[index(Electrode::E4)] - 10.0, -leak, 1e-12);
    EXPECT_THROW(CrosstalkModel{1.0}.validate(), ValidationError);
}

TEST(Noise, SeededStreamIsReproducible) {
    NoiseStream a(NoiseModel{0.01, 5}), b(NoiseModel{0.01, 5}), c(NoiseModel{0.01, 6});
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.next();
        EXPECT_EQ(x, b.next());
        differs |= x != c.next();
    }
    EXPECT_TRUE(differs);
    NoiseStream quiet(NoiseModel{0.0, 1});
    EXPECT_EQ(quiet.next(), 0.0);
    EXPECT_THROW(NoiseStream(NoiseModel{-1.0, 1}), ValidationError);
}

TEST(Noise, SampleSigmaMatchesModel) {
    NoiseStream n(NoiseModel{0.002, 3});
    double s = 0.0, s2 = 0.0;
    constexpr int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double v = n.next();
        s += v;
        s2 += v * v;
    }
    const double mean = s / N;
    const double sd = std::sqrt(s2 / N - mean * mean);
    EXPECT_NEAR(sd, 0.002, 0.002 * 0.01);
    EXPECT_NEAR(mean, 0.0, 0.002 * 0.01);
}

TEST(Frames, SelfFramesNeedTheSelfValue) {
    const auto m = CapacitanceFrame::mutual(0.0, {1, 2, 3, 4});
    EXPECT_NO_THROW(m.validate());
    const auto s = CapacitanceFrame::self(0.0, 6.0);
    EXPECT_NO_THROW(s.validate());
    CapacitanceFrame broken = s;
    broken.self_cap_pf.reset();
    EXPECT_THROW(broken.validate(), ValidationError);
}

TEST(Loads, ForcesMapThroughTheMaterial) {
    SensorModel s;
    AppliedLoad load;
    load.normal_n = 0.98;
    load.shear_x_n = 0.2;
    EXPECT_NEAR(load.pressure_kpa(), 5.0, 1e-12);
    const DeformationState def = displacement_from_forces(s.material, s.geometry, load);
    const auto& m = s.material;
    const double gap_strain = m.strain_break + (5.0 - m.e1_kpa * m.strain_break) / m.e2_kpa;
    EXPECT_NEAR(def.eta_mm / (s.geometry.gap_mm - def.eta_mm), gap_strain, 1e-12);
    EXPECT_NEAR(def.lambda_x_mm, 0.2 * s.material.shear_compliance_mm_per_n, 1e-15);
    load.normal_n = -0.1;
    EXPECT_THROW(displacement_from_forces(s.material, s.geometry, load), DomainError);
    load.normal_n = 1000.0;
    EXPECT_THROW(displacement_from_forces(s.material, s.geometry, load), OutOfRangeError);
    load.normal_n = 0.0;
    load.shear_x_n = 0.9;
    EXPECT_THROW(displacement_from_forces(s.material, s.geometry, load), OutOfRangeError);
}

TEST(Material, BilinearLawMatchesOracle) {
    const MaterialModel m;
    for (double s = 0.0; s <= m.strain_max; s += 0.0037) {
        EXPECT_NEAR(pressure_from_strain(m, s),
                    oracle::bilinear_stress(m.e1_kpa, m.e2_kpa, m.strain_break, s), 1e-12);
        EXPECT_NEAR(strain_from_pressure(m, pressure_from_strain(m, s)), s, 1e-12);
    }
    EXPECT_THROW(pressure_from_strain(m, -0.01), OutOfRangeError);
    EXPECT_THROW(pressure_from_strain(m, 0.61), OutOfRangeError);
    EXPECT_THROW(strain_from_pressure(m, m.max_stress_kpa() + 1.0), OutOfRangeError);
}

TEST(Material, DefaultsAreTheHeadlineCalibration) {
    EXPECT_EQ(MaterialModel{}, paper_material());
    EXPECT_NEAR(secant_modulus(MaterialModel{}, 0.2), 160.0, 1e-9);
}

TEST(Material, ValidationRejectsSofteningAndBadBreak) {
    MaterialModel m;
    m.e2_kpa = 10.0;
    EXPECT_THROW(m.validate(), ValidationError);
    m = MaterialModel{};
    m.strain_break = 0.7;
    EXPECT_THROW(m.validate(), ValidationError);
    m = MaterialModel{};
    m.damping_kpa_s = -1.0;
    EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Material, ShearRangeIsEnforced) {
    const MaterialModel m;
    EXPECT_NEAR(shear_force_from_displacement(m, shear_displacement_from_force(m, 0.5)), 0.5, 1e-12);
    EXPECT_THROW(shear_displacement_from_force(m, 0.81), OutOfRangeError);
    EXPECT_THROW(shear_force_from_displacement(m, -0.8), OutOfRangeError);
}

TEST(Material, ViscoelasticStrainRelaxesToTheStaticValue) {
    MaterialModel m;
    m.damping_kpa_s = 2.0;
    ViscoelasticStrain v(m);
    const double target = m.elastic_strain(10.0);
    const double first = v.advance(10.0, 0.01);
    EXPECT_GT(first, 0.0);
    EXPECT_LT(first, target);
    double prev = first;
    for (int i = 0; i < 400; ++i) {
        const double s = v.advance(10.0, 0.01);
        EXPECT_GE(s, prev - 1e-15);
        prev = s;
    }
    EXPECT_NEAR(prev, target, 1e-6);

    ViscoelasticStrain elastic(MaterialModel{});
    EXPECT_DOUBLE_EQ(elastic.advance(10.0, 0.01), MaterialModel{}.elastic_strain(10.0));
}

TEST(Measure, NoiseFreeMeasurementIsTheModel) {
    SensorModel s;
    NoiseStream quiet(NoiseModel{});
    const DeformationState def{0.2, 0.1, 0.05};
    const auto f = measure(s, def, ProximityStimulus::finger(5.0), quiet, 1.25);
    const Quad want = mutual_capacitances(s, def, proximity_factor(ProximityStimulus::finger(5.0), s.proximity));
    EXPECT_EQ(f.c_pf, want);
    EXPECT_EQ(f.t_s, 1.25);
    EXPECT_EQ(f.mode, FrameMode::Mutual);
}
