#pragma once

// Shared helpers for the test suites: deterministic random states on the
// curved surfaces and small numeric utilities.

#include <array>
#include <cmath>
#include <random>

#include "cnb/dynamics.hpp"

namespace testsup {

using cnb::Curvature;
using cnb::CylindricalState;
using cnb::PlanarState;

/// Random state in the cylindrical chart, kept away from the poles, the
/// equator (chart edge for kappa > 0) and pairwise singularities.
inline CylindricalState random_cylindrical_state(const Curvature& c, std::mt19937_64& rng) {
    const double rbar = c.radius();
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.141592653589793);
    std::uniform_real_distribution<double> vel(-0.35, 0.35);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    while (true) {
        CylindricalState s;
        for (int i = 0; i < 3; ++i) {
            if (c.spherical())
                s.z[i] = -rbar * (0.25 + 0.5 * unit(rng));  // well inside the northern chart
            else
                s.z[i] = rbar * (0.1 + 1.2 * unit(rng));
            s.phi[i] = angle(rng);
            s.phi_dot[i] = vel(rng);
            s.z_dot[i] = 0.3 * vel(rng);
        }
        // keep pairs clearly off the collision/antipodal guards
        bool ok = true;
        const PlanarState p = planar_from_cylindrical(c, s);
        for (int i = 0; i < 3 && ok; ++i)
            for (int j = i + 1; j < 3 && ok; ++j) {
                const double rho2 = cnb::chord_distance_sq(c, p.pos[i], p.pos[j]);
                if (rho2 < 0.25) ok = false;
                if (1.0 - 0.25 * c.kappa * rho2 < 0.1) ok = false;
            }
        if (ok) return s;
    }
}

inline PlanarState random_planar_state(const Curvature& c, std::mt19937_64& rng) {
    return planar_from_cylindrical(c, random_cylindrical_state(c, rng));
}

/// Random flat-space state with pair separations bounded below.
inline PlanarState random_flat_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    while (true) {
        PlanarState s;
        for (int i = 0; i < 3; ++i) {
            s.pos[i] = {coord(rng), coord(rng)};
            s.vel[i] = {0.5 * coord(rng), 0.5 * coord(rng)};
        }
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i)
            for (int j = i + 1; j < 3 && ok; ++j) {
                const double dx = s.pos[i].x - s.pos[j].x;
                const double dy = s.pos[i].y - s.pos[j].y;
                if (dx * dx + dy * dy < 0.1) ok = false;
            }
        if (ok) return s;
    }
}

inline PlanarState rotate_state(const PlanarState& s, double beta) {
    PlanarState out = s;
    const double cs = std::cos(beta), sn = std::sin(beta);
    for (int i = 0; i < 3; ++i) {
        out.pos[i] = {cs * s.pos[i].x - sn * s.pos[i].y, sn * s.pos[i].x + cs * s.pos[i].y};
        out.vel[i] = {cs * s.vel[i].x - sn * s.vel[i].y, sn * s.vel[i].x + cs * s.vel[i].y};
    }
    return out;
}

inline double state_distance(const PlanarState& a, const PlanarState& b) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, std::fabs(a.pos[i].x - b.pos[i].x));
        worst = std::max(worst, std::fabs(a.pos[i].y - b.pos[i].y));
        worst = std::max(worst, std::fabs(a.vel[i].x - b.vel[i].x));
        worst = std::max(worst, std::fabs(a.vel[i].y - b.vel[i].y));
    }
    return worst;
}

}  // namespace testsup
