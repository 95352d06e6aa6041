#pragma once

// Reference computations written independently of the library code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace oracle {

// Length of the intersection of [a0, a1] and [b0, b1].
inline double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Four half-overlapping top electrodes over a square bottom electrode of
// half-width B. A top electrode of length 2L straddles one edge of the bottom
// electrode and moves with the top layer by (lx, ly). Returns C1..C4 for
// E1 on the +x edge, E3 on the -x edge, E2 on the -y edge, E4 on the +y edge,
// each eps_w * overlap / (d - eta).
inline std::array<double, 4> overlap_caps(double eps_w, double l, double d, double eta, double lx, double ly) {
    constexpr double B = 4.5;
    const double gap = d - eta;
    std::array<double, 4> c{};
    c[0] = eps_w * overlap(B - l + lx, B + l + lx, -B, B) / gap;
    c[2] = eps_w * overlap(-B - l + lx, -B + l + lx, -B, B) / gap;
    c[1] = eps_w * overlap(-B - l + ly, -B + l + ly, -B, B) / gap;
    c[3] = eps_w * overlap(B - l + ly, B + l + ly, -B, B) / gap;
    return c;
}

inline double bilinear_stress(double e1, double e2, double b, double s) {
    return s <= b ? e1 * s : e1 * b + e2 * (s - b);
}

// Nearest code, ties away from zero.
inline std::int64_t nearest_code(double v, double lsb) {
    const double q = v / lsb;
    return static_cast<std::int64_t>(q >= 0 ? std::floor(q + 0.5) : std::ceil(q - 0.5));
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

}  // namespace oracle
