#pragma once

#include <array>

#include "cnb/geometry.hpp"

namespace cnb {

/// Three masses; a zero entry encodes a negligible body that feels forces
/// but exerts none. At least one mass must be positive.
struct MassVector {
    double m1 = 1.0, m2 = 1.0, m3 = 1.0;

    double operator[](int i) const { return i == 0 ? m1 : (i == 1 ? m2 : m3); }
    double total() const { return m1 + m2 + m3; }
    void validate() const;
};

struct Vec2 {
    double x = 0.0, y = 0.0;
};

/// Reduced state: planar coordinates of the three bodies with the vertical
/// coordinate eliminated through the embedding constraint.
struct PlanarState {
    std::array<PlanarPoint, 3> pos{};
    std::array<Vec2, 3> vel{};
};

/// Full ambient state (x, y, z) per body on the embedded surface.
struct BodyState3D {
    std::array<Point3, 3> pos{};
    std::array<Point3, 3> vel{};
};

/// (phi, z) chart: polar angle in the xy-plane and height on the rotation
/// axis. Valid for kappa != 0 and away from the poles.
struct CylindricalState {
    std::array<double, 3> phi{};
    std::array<double, 3> z{};
    std::array<double, 3> phi_dot{};
    std::array<double, 3> z_dot{};
};

struct CylAccel {
    std::array<double, 3> phi_dd{};
    std::array<double, 3> z_dd{};
};

/// First integrals. For kappa != 0, (c1, c2, c3) are the components of the
/// total angular momentum; for kappa = 0, c1 and c2 degenerate into the two
/// linear-momentum integrals.
struct ConservedQuantities {
    double h = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

// --- right-hand sides -------------------------------------------------------

/// Accelerations of the reduced planar system. Agrees with the classical
/// Newtonian right-hand side at kappa = 0 and with the ambient system through
/// the chart lift elsewhere.
std::array<Vec2, 3> accel_reduced(const Curvature& c, const MassVector& m, const PlanarState& s);

/// Classical planar 3-body right-hand side (kappa = 0).
std::array<Vec2, 3> accel_newtonian(const MassVector& m, const PlanarState& s);

/// Accelerations of the ambient (constrained) system.
std::array<Point3, 3> accel_extrinsic(const Curvature& c, const MassVector& m,
                                      const BodyState3D& s);

/// Accelerations in the (phi, z) chart; kappa != 0, all bodies off the poles.
CylAccel accel_cylindrical(const Curvature& c, const MassVector& m, const CylindricalState& s);

// --- first integrals --------------------------------------------------------

/// Total energy T - U of a reduced state.
double energy(const Curvature& c, const MassVector& m, const PlanarState& s);

/// Energy plus the momentum integrals of a reduced state (see
/// ConservedQuantities for the kappa = 0 convention).
ConservedQuantities angular_momenta(const Curvature& c, const MassVector& m, const PlanarState& s);

double energy_extrinsic(const Curvature& c, const MassVector& m, const BodyState3D& s);
ConservedQuantities conserved_extrinsic(const Curvature& c, const MassVector& m,
                                        const BodyState3D& s);

/// Largest embedding-constraint residual over bodies and both constraints.
double max_constraint_residual(const Curvature& c, const BodyState3D& s);

// --- chart maps -------------------------------------------------------------

/// Lift a reduced state onto the surface (northern chart for kappa > 0).
BodyState3D lift_state(const Curvature& c, const PlanarState& s);

/// Drop the vertical components.
PlanarState planar_projection(const BodyState3D& s);

/// Squared planar radius of the parallel circle at height z.
double parallel_radius_sq(const Curvature& c, double z);

PlanarState planar_from_cylindrical(const Curvature& c, const CylindricalState& s);
CylindricalState cylindrical_from_planar(const Curvature& c, const PlanarState& s);

/// Maps cylindrical accelerations to planar ones via the chain rule of the
/// polar transformation; used to cross-check the formulations.
std::array<Vec2, 3> planar_accel_from_cylindrical(const Curvature& c, const CylindricalState& s,
                                                  const CylAccel& a);

}  // namespace cnb
