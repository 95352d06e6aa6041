// Press and shear one taxel, read it out through the converter, decode it.

#include <cstdio>

#include "taxel/taxel.hpp"

int main() {
    using namespace taxel;

    SensorModel sensor;
    sensor.material = paper_material();
    NoiseStream noise(NoiseModel{0.002, 7});

    AppliedLoad load;
    load.normal_n = 0.98;  // 5 kPa on the 14 x 14 mm indenter
    load.shear_x_n = 0.3;
    load.shear_y_n = -0.1;

    const CapacitanceFrame base = measure(sensor, DeformationState{}, ProximityStimulus::none(), noise, 0.0);
    const CapacitanceFrame cur = measure(sensor, load, ProximityStimulus::none(), noise, 0.044);

    const DecodedState d = decode(base, cur, sensor.geometry, sensor.material, ClassifierThresholds{});
    std::printf("C  = %.4f %.4f %.4f %.4f pF\n", cur.c_pf[0], cur.c_pf[1], cur.c_pf[2], cur.c_pf[3]);
    std::printf("pressure %.3f kPa, shear %.3f N at %.1f deg, class %s\n", d.pressure_kpa, d.shear_force_n,
                d.shear_angle_deg, d.stimulus.label().c_str());
}
