#include "cnb/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "cnb/errors.hpp"

namespace cnb {

double Curvature::sqrt_abs() const { return std::sqrt(std::fabs(kappa)); }

double Curvature::radius() const {
    if (kappa == 0.0) throw domain_error("radius undefined for zero curvature");
    return 1.0 / sqrt_abs();
}

double chart_root(const Curvature& c, double A) {
    const double u = 1.0 - c.kappa * A;
    if (u < -tol::chart)
        throw domain_error("point outside the reduced chart: kappa*(x^2+y^2) > 1");
    // 1 - kappa*A is a cancellation; below ~1e-14 the sign is rounding noise
    // while sqrt would amplify it to 1e-7. Such points are on the equator.
    if (u < 1e-14) return 0.0;
    return std::sqrt(u);
}

double omega_from_planar(const Curvature& c, const PlanarPoint& p) {
    const double A = p.radius_sq();
    const double root = chart_root(c, A);
    return -c.sigma() * c.sqrt_abs() * A / (1.0 + root);
}

double omega_dot_from_planar(const Curvature& c, const PlanarPoint& p, double vx, double vy) {
    const double radial = p.x * vx + p.y * vy;
    if (radial == 0.0 || c.flat()) return 0.0;
    const double root = chart_root(c, p.radius_sq());
    if (root == 0.0) throw chart_error("nonzero radial velocity at the chart boundary");
    return -c.sigma() * c.sqrt_abs() * radial / root;
}

std::pair<double, double> constraint_residuals(const Curvature& c, const Point3& pos,
                                               const Point3& vel) {
    const double sg = c.sigma();
    const double sk = c.sqrt_abs();
    const double g_pos =
        c.kappa * (pos.x * pos.x + pos.y * pos.y + sg * pos.z * pos.z) + 2.0 * sk * pos.z;
    const double g_vel =
        c.kappa * (pos.x * vel.x + pos.y * vel.y + sg * pos.z * vel.z) + sk * vel.z;
    return {g_pos, g_vel};
}

double chord_distance_sq(const Curvature& c, const PlanarPoint& p, const PlanarPoint& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    double rho2 = dx * dx + dy * dy;
    const double dA = p.radius_sq() - q.radius_sq();
    if (dA != 0.0) {
        const double denom = chart_root(c, p.radius_sq()) + chart_root(c, q.radius_sq());
        if (denom == 0.0)
            throw domain_error("chord undefined: distinct radii but both points at the chart edge");
        const double t = dA / denom;
        rho2 += c.kappa * t * t;
    }
    return std::max(rho2, 0.0);
}

double geodesic_distance(const Curvature& c, double rho) {
    if (rho < 0.0) throw domain_error("chord length must be nonnegative");
    if (c.spherical()) {
        const double x = 0.5 * c.sqrt_abs() * rho;
        if (x > 1.0 + tol::chart) throw domain_error("chord exceeds the sphere diameter");
        return 2.0 / c.sqrt_abs() * std::asin(std::min(x, 1.0));
    }
    if (c.hyperbolic()) return 2.0 / c.sqrt_abs() * std::asinh(0.5 * c.sqrt_abs() * rho);
    return rho;
}

}  // namespace cnb
