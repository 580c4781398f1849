#include "cnb/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "cnb/errors.hpp"

namespace cnb {

void MassVector::validate() const {
    for (int i = 0; i < 3; ++i) {
        const double v = (*this)[i];
        if (!std::isfinite(v) || v < 0.0)
            throw domain_error("masses must be finite and nonnegative");
    }
    if (m1 <= 0.0 && m2 <= 0.0 && m3 <= 0.0)
        throw domain_error("at least one mass must be positive");
}

namespace {

struct ChartData {
    double A = 0.0;       // x^2 + y^2
    double u = 0.0;       // 1 - kappa*A, clamped at the chart edge
    double root = 0.0;    // sqrt(u)
    double radial = 0.0;  // x*vx + y*vy
    double B = 0.0;       // radial^2 / u, with the boundary-tangent limit 0
};

ChartData chart_data(const Curvature& c, const PlanarPoint& p, const Vec2& v) {
    ChartData d;
    d.A = p.radius_sq();
    const double u_raw = 1.0 - c.kappa * d.A;
    if (u_raw < -tol::chart)
        throw domain_error("body outside the reduced chart: kappa*(x^2+y^2) > 1");
    // snap the chart-edge cancellation to an exact equator position, matching
    // chart_root; sqrt(1e-16-scale noise) would otherwise inject 1e-8 errors
    d.u = (u_raw < 1e-14) ? 0.0 : u_raw;
    d.root = std::sqrt(d.u);
    d.radial = p.x * v.x + p.y * v.y;
    if (d.radial == 0.0 || d.u == 0.0) {
        // A body can sit on the chart boundary (the equator) only while moving
        // tangentially; anything beyond rounding noise there is off-surface.
        const double scale =
            (1.0 + std::fabs(p.x) + std::fabs(p.y)) * (1.0 + std::fabs(v.x) + std::fabs(v.y));
        if (d.u == 0.0 && std::fabs(d.radial) > 1e-8 * scale)
            throw chart_error("nonzero radial velocity at the chart boundary");
        d.B = 0.0;
    } else {
        d.B = d.radial * d.radial / d.u;
    }
    return d;
}

// rho^3 (1 - kappa rho^2/4)^{3/2} with collision/antipodal guards.
double pair_denominator(const Curvature& c, double rho2, double* w_out = nullptr) {
    if (rho2 < tol::singularity * tol::singularity)
        throw singularity_error("collision: two bodies coincide");
    const double w = 1.0 - 0.25 * c.kappa * rho2;
    if (w < tol::singularity)
        throw singularity_error("antipodal singularity: kappa*rho^2/4 reaches 1");
    if (w_out) *w_out = w;
    return rho2 * std::sqrt(rho2) * w * std::sqrt(w);
}

double chord_sq_from_chart(const Curvature& c, const PlanarState& s, const ChartData& di,
                           const ChartData& dj, int i, int j) {
    const double dx = s.pos[i].x - s.pos[j].x;
    const double dy = s.pos[i].y - s.pos[j].y;
    double rho2 = dx * dx + dy * dy;
    const double dA = di.A - dj.A;
    if (dA != 0.0) {
        const double denom = di.root + dj.root;
        if (denom == 0.0)
            throw domain_error("chord undefined: distinct radii but both bodies at the chart edge");
        const double t = dA / denom;
        rho2 += c.kappa * t * t;
    }
    return std::max(rho2, 0.0);
}

}  // namespace

std::array<Vec2, 3> accel_reduced(const Curvature& c, const MassVector& m, const PlanarState& s) {
    m.validate();
    std::array<ChartData, 3> cd;
    for (int i = 0; i < 3; ++i) cd[i] = chart_data(c, s.pos[i], s.vel[i]);

    double rho2[3][3] = {};
    double denom[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            rho2[i][j] = rho2[j][i] = chord_sq_from_chart(c, s, cd[i], cd[j], i, j);
            denom[i][j] = denom[j][i] = pair_denominator(c, rho2[i][j]);
        }

    std::array<Vec2, 3> acc{};
    for (int i = 0; i < 3; ++i) {
        double ax = 0.0, ay = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i || m[j] == 0.0) continue;
            const double f = 1.0 - 0.5 * c.kappa * rho2[i][j];
            ax += m[j] * (s.pos[j].x - f * s.pos[i].x) / denom[i][j];
            ay += m[j] * (s.pos[j].y - f * s.pos[i].y) / denom[i][j];
        }
        const double v2 = s.vel[i].x * s.vel[i].x + s.vel[i].y * s.vel[i].y;
        const double curv = c.kappa * (v2 + c.kappa * cd[i].B);
        acc[i] = {ax - curv * s.pos[i].x, ay - curv * s.pos[i].y};
    }
    return acc;
}

std::array<Vec2, 3> accel_newtonian(const MassVector& m, const PlanarState& s) {
    m.validate();
    std::array<Vec2, 3> acc{};
    double denom[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double dx = s.pos[i].x - s.pos[j].x;
            const double dy = s.pos[i].y - s.pos[j].y;
            const double r2 = dx * dx + dy * dy;
            if (r2 < tol::singularity * tol::singularity)
                throw singularity_error("collision: two bodies coincide");
            denom[i][j] = denom[j][i] = r2 * std::sqrt(r2);
        }
    for (int i = 0; i < 3; ++i) {
        double ax = 0.0, ay = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i || m[j] == 0.0) continue;
            ax += m[j] * (s.pos[j].x - s.pos[i].x) / denom[i][j];
            ay += m[j] * (s.pos[j].y - s.pos[i].y) / denom[i][j];
        }
        acc[i] = {ax, ay};
    }
    return acc;
}

std::array<Point3, 3> accel_extrinsic(const Curvature& c, const MassVector& m,
                                      const BodyState3D& s) {
    m.validate();
    const double sg = c.sigma();
    const double sk = c.sqrt_abs();

    double rho2[3][3] = {};
    double denom[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double dx = s.pos[i].x - s.pos[j].x;
            const double dy = s.pos[i].y - s.pos[j].y;
            const double dz = s.pos[i].z - s.pos[j].z;
            rho2[i][j] = rho2[j][i] = std::max(dx * dx + dy * dy + sg * dz * dz, 0.0);
            denom[i][j] = denom[j][i] = pair_denominator(c, rho2[i][j]);
        }

    std::array<Point3, 3> acc{};
    for (int i = 0; i < 3; ++i) {
        double gx = 0.0, gy = 0.0, gz = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i || m[j] == 0.0) continue;
            const double f = 1.0 - 0.5 * c.kappa * rho2[i][j];
            gx += m[j] * (s.pos[j].x - f * s.pos[i].x) / denom[i][j];
            gy += m[j] * (s.pos[j].y - f * s.pos[i].y) / denom[i][j];
            gz += m[j] * (s.pos[j].z - f * s.pos[i].z + 0.5 * sg * sk * rho2[i][j]) / denom[i][j];
        }
        const double vv = s.vel[i].x * s.vel[i].x + s.vel[i].y * s.vel[i].y +
                          sg * s.vel[i].z * s.vel[i].z;
        acc[i].x = gx - c.kappa * vv * s.pos[i].x;
        acc[i].y = gy - c.kappa * vv * s.pos[i].y;
        acc[i].z = gz - vv * (c.kappa * s.pos[i].z + sg * sk);
    }
    return acc;
}

double parallel_radius_sq(const Curvature& c, double z) {
    if (c.flat()) throw domain_error("parallel circles require kappa != 0");
    return -c.sigma() * (z * z + 2.0 * c.radius() * z);
}

CylAccel accel_cylindrical(const Curvature& c, const MassVector& m, const CylindricalState& s) {
    if (c.flat()) throw domain_error("cylindrical chart requires kappa != 0");
    m.validate();
    const double sg = c.sigma();
    const double sk = c.sqrt_abs();
    const double rbar = c.radius();

    double P[3], Pd[3], root[3];
    for (int i = 0; i < 3; ++i) {
        P[i] = parallel_radius_sq(c, s.z[i]);
        if (!(P[i] > tol::chart)) throw chart_error("cylindrical chart singular at the poles");
        root[i] = std::sqrt(P[i]);
        Pd[i] = -2.0 * sg * s.z_dot[i] * (s.z[i] + rbar);
    }

    double rho2[3][3] = {};
    double denom[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double dz = s.z[i] - s.z[j];
            const double r2 = P[i] + P[j] - 2.0 * root[i] * root[j] * std::cos(s.phi[i] - s.phi[j]) +
                              sg * dz * dz;
            rho2[i][j] = rho2[j][i] = std::max(r2, 0.0);
            denom[i][j] = denom[j][i] = pair_denominator(c, rho2[i][j]);
        }

    CylAccel out;
    for (int i = 0; i < 3; ++i) {
        double tangential = 0.0, vertical = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i || m[j] == 0.0) continue;
            tangential += m[j] * root[j] * std::sin(s.phi[j] - s.phi[i]) / denom[i][j];
            vertical += m[j] *
                        (s.z[j] - s.z[i] + 0.5 * c.kappa * rho2[i][j] * (s.z[i] + rbar)) /
                        denom[i][j];
        }
        const double speed2 = Pd[i] * Pd[i] / (4.0 * P[i]) + s.phi_dot[i] * s.phi_dot[i] * P[i] +
                              sg * s.z_dot[i] * s.z_dot[i];
        out.phi_dd[i] = tangential / root[i] - s.phi_dot[i] * Pd[i] / P[i];
        out.z_dd[i] = vertical - (c.kappa * s.z[i] + sg * sk) * speed2;
    }
    return out;
}

double energy(const Curvature& c, const MassVector& m, const PlanarState& s) {
    m.validate();
    std::array<ChartData, 3> cd;
    for (int i = 0; i < 3; ++i) cd[i] = chart_data(c, s.pos[i], s.vel[i]);

    double kinetic = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double v2 = s.vel[i].x * s.vel[i].x + s.vel[i].y * s.vel[i].y;
        kinetic += 0.5 * m[i] * (v2 + c.kappa * cd[i].B);
    }
    double force_function = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            if (m[i] == 0.0 || m[j] == 0.0) continue;
            const double rho2 = chord_sq_from_chart(c, s, cd[i], cd[j], i, j);
            double w = 0.0;
            pair_denominator(c, rho2, &w);  // guards; w = 1 - kappa rho^2/4
            const double rho = std::sqrt(rho2);
            force_function += m[i] * m[j] * (1.0 - 0.5 * c.kappa * rho2) / (rho * std::sqrt(w));
        }
    return kinetic - force_function;
}

ConservedQuantities angular_momenta(const Curvature& c, const MassVector& m,
                                    const PlanarState& s) {
    ConservedQuantities q;
    q.h = energy(c, m, s);
    if (c.flat()) {
        for (int i = 0; i < 3; ++i) {
            q.c1 += m[i] * s.vel[i].x;
            q.c2 += m[i] * s.vel[i].y;
            q.c3 += m[i] * (s.pos[i].y * s.vel[i].x - s.pos[i].x * s.vel[i].y);
        }
        return q;
    }
    const double sg = c.sigma();
    const double sk = c.sqrt_abs();
    const double rbar = c.radius();
    for (int i = 0; i < 3; ++i) {
        const ChartData d = chart_data(c, s.pos[i], s.vel[i]);
        // signed square root of B, chosen so zdot = -sigma |kappa|^{1/2} Broot;
        // with it, c1 and c2 are the momentum-map integrals of the vertical
        // rotation/boost symmetries (|kappa|^{1/2} c1 -> sum m xdot as kappa -> 0)
        const double broot = (d.radial == 0.0 || d.u == 0.0) ? 0.0 : d.radial / d.root;
        const double lift = d.A / (1.0 + d.root);
        q.c1 += m[i] * (sg * sk * (broot * s.pos[i].x - lift * s.vel[i].x) + rbar * s.vel[i].x);
        q.c2 += m[i] * (sg * sk * (broot * s.pos[i].y - lift * s.vel[i].y) + rbar * s.vel[i].y);
        q.c3 += sg * m[i] * (s.pos[i].y * s.vel[i].x - s.pos[i].x * s.vel[i].y);
    }
    return q;
}

double energy_extrinsic(const Curvature& c, const MassVector& m, const BodyState3D& s) {
    m.validate();
    const double sg = c.sigma();
    double kinetic = 0.0;
    for (int i = 0; i < 3; ++i) {
        kinetic += 0.5 * m[i] *
                   (s.vel[i].x * s.vel[i].x + s.vel[i].y * s.vel[i].y +
                    sg * s.vel[i].z * s.vel[i].z);
    }
    double force_function = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            if (m[i] == 0.0 || m[j] == 0.0) continue;
            const double dx = s.pos[i].x - s.pos[j].x;
            const double dy = s.pos[i].y - s.pos[j].y;
            const double dz = s.pos[i].z - s.pos[j].z;
            const double rho2 = std::max(dx * dx + dy * dy + sg * dz * dz, 0.0);
            double w = 0.0;
            pair_denominator(c, rho2, &w);
            force_function +=
                m[i] * m[j] * (1.0 - 0.5 * c.kappa * rho2) / (std::sqrt(rho2) * std::sqrt(w));
        }
    return kinetic - force_function;
}

ConservedQuantities conserved_extrinsic(const Curvature& c, const MassVector& m,
                                        const BodyState3D& s) {
    ConservedQuantities q;
    q.h = energy_extrinsic(c, m, s);
    const double sg = c.sigma();
    if (c.flat()) {
        for (int i = 0; i < 3; ++i) {
            q.c1 += m[i] * s.vel[i].x;
            q.c2 += m[i] * s.vel[i].y;
            q.c3 += m[i] * (s.pos[i].y * s.vel[i].x - s.pos[i].x * s.vel[i].y);
        }
        return q;
    }
    const double rbar = c.radius();
    for (int i = 0; i < 3; ++i) {
        // ambient form of the chart integrals: angular momentum / boost
        // momentum about the quadric's center (0, 0, -rbar), valid in both
        // hemispheres
        q.c1 += m[i] * ((s.pos[i].z + rbar) * s.vel[i].x - s.vel[i].z * s.pos[i].x);
        q.c2 += m[i] * ((s.pos[i].z + rbar) * s.vel[i].y - s.vel[i].z * s.pos[i].y);
        q.c3 += sg * m[i] * (s.pos[i].y * s.vel[i].x - s.pos[i].x * s.vel[i].y);
    }
    return q;
}

double max_constraint_residual(const Curvature& c, const BodyState3D& s) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto [g_pos, g_vel] = constraint_residuals(c, s.pos[i], s.vel[i]);
        worst = std::max({worst, std::fabs(g_pos), std::fabs(g_vel)});
    }
    return worst;
}

BodyState3D lift_state(const Curvature& c, const PlanarState& s) {
    BodyState3D out;
    for (int i = 0; i < 3; ++i) {
        out.pos[i] = {s.pos[i].x, s.pos[i].y, omega_from_planar(c, s.pos[i])};
        out.vel[i] = {s.vel[i].x, s.vel[i].y,
                      omega_dot_from_planar(c, s.pos[i], s.vel[i].x, s.vel[i].y)};
    }
    return out;
}

PlanarState planar_projection(const BodyState3D& s) {
    PlanarState out;
    for (int i = 0; i < 3; ++i) {
        out.pos[i] = {s.pos[i].x, s.pos[i].y};
        out.vel[i] = {s.vel[i].x, s.vel[i].y};
    }
    return out;
}

PlanarState planar_from_cylindrical(const Curvature& c, const CylindricalState& s) {
    PlanarState out;
    const double sg = c.sigma();
    const double rbar = c.radius();
    for (int i = 0; i < 3; ++i) {
        const double P = parallel_radius_sq(c, s.z[i]);
        if (!(P > 0.0)) throw chart_error("cylindrical chart singular at the poles");
        const double p = std::sqrt(P);
        const double pd = -2.0 * sg * s.z_dot[i] * (s.z[i] + rbar) / (2.0 * p);
        const double cs = std::cos(s.phi[i]);
        const double sn = std::sin(s.phi[i]);
        out.pos[i] = {p * cs, p * sn};
        out.vel[i] = {pd * cs - p * sn * s.phi_dot[i], pd * sn + p * cs * s.phi_dot[i]};
    }
    return out;
}

CylindricalState cylindrical_from_planar(const Curvature& c, const PlanarState& s) {
    CylindricalState out;
    for (int i = 0; i < 3; ++i) {
        const double A = s.pos[i].radius_sq();
        if (!(A > 0.0)) throw chart_error("cylindrical chart singular at the poles");
        out.phi[i] = std::atan2(s.pos[i].y, s.pos[i].x);
        out.z[i] = omega_from_planar(c, s.pos[i]);
        out.phi_dot[i] = (s.pos[i].x * s.vel[i].y - s.pos[i].y * s.vel[i].x) / A;
        out.z_dot[i] = omega_dot_from_planar(c, s.pos[i], s.vel[i].x, s.vel[i].y);
    }
    return out;
}

std::array<Vec2, 3> planar_accel_from_cylindrical(const Curvature& c, const CylindricalState& s,
                                                  const CylAccel& a) {
    std::array<Vec2, 3> out{};
    const double sg = c.sigma();
    const double rbar = c.radius();
    for (int i = 0; i < 3; ++i) {
        const double P = parallel_radius_sq(c, s.z[i]);
        const double p = std::sqrt(P);
        const double Pd = -2.0 * sg * s.z_dot[i] * (s.z[i] + rbar);
        const double Pdd =
            -2.0 * sg * (a.z_dd[i] * (s.z[i] + rbar) + s.z_dot[i] * s.z_dot[i]);
        const double pd = Pd / (2.0 * p);
        const double pdd = Pdd / (2.0 * p) - Pd * Pd / (4.0 * P * p);
        const double cs = std::cos(s.phi[i]);
        const double sn = std::sin(s.phi[i]);
        const double radial = pdd - p * s.phi_dot[i] * s.phi_dot[i];
        const double transverse = 2.0 * pd * s.phi_dot[i] + p * a.phi_dd[i];
        out[i] = {radial * cs - transverse * sn, radial * sn + transverse * cs};
    }
    return out;
}

}  // namespace cnb
