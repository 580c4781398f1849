#pragma once

#include <utility>

namespace cnb {

// Shared numeric tolerances.
namespace tol {
inline constexpr double manifold = 1e-10;     // default "on the manifold" residual
inline constexpr double singularity = 1e-12;  // collision / antipodal guard
inline constexpr double chart = 1e-9;         // slack on 1 - kappa*A at the chart edge
}  // namespace tol

/// Signed Gaussian curvature selecting the active surface: sphere for
/// kappa > 0, plane for kappa == 0, hyperbolic sheet for kappa < 0.
/// All three surfaces meet at the origin of the ambient frame.
struct Curvature {
    double kappa = 0.0;

    Curvature() = default;
    explicit Curvature(double k) : kappa(k) {}

    /// Sign convention: +1 for kappa >= 0, -1 for kappa < 0.
    double sigma() const { return kappa < 0.0 ? -1.0 : 1.0; }
    /// |kappa|^{1/2}
    double sqrt_abs() const;
    /// |kappa|^{-1/2}. Rejects kappa == 0.
    double radius() const;

    bool spherical() const { return kappa > 0.0; }
    bool hyperbolic() const { return kappa < 0.0; }
    bool flat() const { return kappa == 0.0; }
};

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct PlanarPoint {
    double x = 0.0, y = 0.0;
    /// A = x^2 + y^2
    double radius_sq() const { return x * x + y * y; }
};

/// sqrt(1 - kappa*A), clamped to 0 inside the chart-edge tolerance.
/// Rejects points clearly outside the reduced chart (kappa*A > 1).
double chart_root(const Curvature& c, double A);

/// Height of the surface point above the planar point p. Evaluated in
/// conjugate form, -sigma*|kappa|^{1/2}*A / (1 + sqrt(1-kappa*A)), so the
/// expression stays finite and continuous through kappa = 0.
double omega_from_planar(const Curvature& c, const PlanarPoint& p);

/// Vertical velocity of the lifted point for planar velocity (vx, vy).
double omega_dot_from_planar(const Curvature& c, const PlanarPoint& p, double vx, double vy);

/// Residuals of the two embedding constraints: the position constraint
/// kappa*(x^2+y^2+sigma z^2) + 2|kappa|^{1/2} z and its time derivative
/// kappa*(r . rdot) + |kappa|^{1/2} zdot, with the sigma-weighted product.
/// Both vanish identically for kappa = 0.
std::pair<double, double> constraint_residuals(const Curvature& c, const Point3& pos,
                                               const Point3& vel);

/// Squared ambient chord (Minkowski chord for kappa < 0) between the surface
/// points above p and q, written so it is analytic in kappa through 0:
/// |p-q|^2 + kappa*(A_p - A_q)^2 / (sqrt(1-kappa*A_p) + sqrt(1-kappa*A_q))^2.
double chord_distance_sq(const Curvature& c, const PlanarPoint& p, const PlanarPoint& q);

/// Geodesic arc length subtended by a chord of length rho.
double geodesic_distance(const Curvature& c, double rho);

}  // namespace cnb
