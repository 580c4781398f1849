#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cnb/dynamics.hpp"

namespace cnb {

enum class Family {
    equatorial_scalene,
    isosceles_band,
    lagrange_equal_mass,
    planetary,
    restricted_equal_mass,
    general_restricted,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);  // accepts '-' or '_', plus short aliases

enum class Hemisphere { north, south };
enum class Branch { inner, outer };

/// A rigidly rotating candidate solution: each body moves on the circle of
/// planar radius radii[i] with phase phases[i], common angular velocity alpha.
struct ReCandidate {
    Family family = Family::lagrange_equal_mass;
    double kappa = 0.0;
    MassVector masses;
    std::array<double, 3> radii{};
    std::array<double, 3> phases{};
    double theta = 0.0;  // phase gap for the restricted families
    double alpha = 0.0;  // signed angular velocity

    double alpha2() const { return alpha * alpha; }
};

/// Shape data of an isosceles relative equilibrium on a parallel circle.
struct IsoscelesSolution {
    double s = 0.0;           // cos of the apex phase gap, in (-1, 0)
    double a = 0.0;           // apex phase gap, in (pi/2, pi)
    double gamma = 0.0;       // latitude parameter gamma = lambda(2 - lambda)
    double lambda = 0.0;      // parallel-circle parameter; 1 is the equator
    double mass_ratio = 0.0;  // M/m = -2s
};

// --- shape curve ------------------------------------------------------------

/// The rational shape-latitude relation F(s) = -(4s+2)/(4s^3+4s^2-5s-3),
/// evaluated through its factored form so the removable factor cancels.
/// Domain (-1, 0) minus the equilateral point s = -1/2, where F is 0/0.
double f_of_s(double s);

/// All shape roots s solving F(s) = gamma on the two monotone branches of F
/// (decreasing left of -1/4, increasing right of it). The right-isosceles
/// limit s -> 0 is excluded. The equilateral root s = -1/2 appears only when
/// gamma hits F's smooth continuation value 2/3 exactly; builders route that
/// shape to the equal-mass family.
std::vector<double> isosceles_shapes_at_latitude(double gamma);

/// Shape data for masses (M, m, m); requires 0 < M < 2m and M != m.
IsoscelesSolution isosceles_solution(double M, double m, Hemisphere hemi);

// --- constructors -----------------------------------------------------------

ReCandidate isosceles_re_build(const Curvature& c, double M, double m, Hemisphere hemi,
                               Branch branch, int direction);

/// Equal-mass equilateral rotation on a parallel circle; the circle parameter
/// is lambda in (0, 2) for kappa > 0 and the height v > 0 for kappa < 0.
ReCandidate lagrange_equal_mass_build(const Curvature& c, double m, double lambda_or_v,
                                      int direction);

/// Masses (up to scale, m2 = 1) making the angle triple a relative equilibrium
/// on the equator, together with the scale factor gamma of the solution ray.
/// Fails unless the inscribed triangle is acute and scalene.
std::pair<MassVector, double> equatorial_masses_from_angles(const Curvature& c, double a1,
                                                            double a2, double a3);

/// Equatorial candidate from angles; alpha is free and supplied by the caller.
ReCandidate equatorial_re_build(const Curvature& c, double a1, double a2, double a3, double alpha);

/// One massive body at rest at the origin, two negligible ones on a shared
/// circle of radius r; exists for every curvature with kappa*r^2 < 1.
ReCandidate planetary_re_build(const Curvature& c, double m, double r, int direction);

/// Two equal masses diametrically opposed on the circle of radius
/// (2 kappa)^{-1/2} plus a negligible body on the equator; kappa > 0 only.
ReCandidate restricted_equalmass_re_build(const Curvature& c, double m, int direction);

// --- verification -----------------------------------------------------------

/// State of the candidate at time t.
PlanarState instantiate(const ReCandidate& cand, double t = 0.0);

/// Max over bodies (negligible ones included) of |accel + alpha^2 * q|, the
/// defect of the rigid-rotation ansatz against the reduced dynamics.
double re_residual(const Curvature& c, const MassVector& m, const ReCandidate& cand);

double rotation_period(const ReCandidate& cand);

nlohmann::json candidate_to_json(const ReCandidate& cand);
ReCandidate candidate_from_json(const nlohmann::json& j);

// --- nonexistence scans -------------------------------------------------

enum class ScanCase {
    equator_hemisphere,         // one body on the equator, hemisphere-confined
    hyperbolic_isosceles,       // isosceles shapes on hyperbolic parallel circles
    hyperbolic_restricted_equal,  // equal primaries + negligible body, kappa < 0
    general_restricted,         // unequal primaries + negligible body
    scalene_parallel,           // exploratory: scalene shapes off the equator
};

const char* scan_case_name(ScanCase sc);
ScanCase scan_case_from_name(const std::string& name);

struct ScanRequest {
    ScanCase scase = ScanCase::hyperbolic_restricted_equal;
    Curvature c{1.0};
    MassVector masses;
    int n1 = 80;
    int n2 = 80;
    double margin = 0.01;  // distance kept from the excluded solution sets
    double r_max = 5.0;    // radial extent where a case needs one
};

struct ScanResult {
    std::vector<std::string> param_names;    // K names; rows carry K params + residual
    std::vector<std::vector<double>> rows;
    double min_residual = 0.0;
    std::vector<double> argmin;
    std::string notes;  // grid ranges and margins, for the output manifest
};

/// Evaluates the algebraic obstruction of the requested case over a grid and
/// returns the per-point residuals with their minimum. A residual bounded
/// away from zero is numerical evidence of nonexistence, not a proof.
ScanResult scan_nonexistence(const ScanRequest& req);

// Obstruction integrands, exposed for direct testing.

/// Vertical balance defect of a body sitting on the equator while the other
/// two stay at heights -u, -v inside the same closed hemisphere (kappa > 0).
double equator_confinement_residual(const Curvature& c, const MassVector& m, double u, double v,
                                    const std::array<double, 3>& phases);

/// F(s) + mu(mu+2): distance between the shape curve and the (negative)
/// hyperbolic latitude parameter delta = -mu(mu+2).
double latitude_sign_obstruction(double s, double mu);

/// kappa r^2 / (sqrt(1-kappa r^2) + sqrt(1-2 kappa r^2))^2, which a
/// hyperbolic equal-primary candidate would need to equal 1.
double hyperbolic_pair_radius_identity(const Curvature& c, double r);

/// Second factor of the factorized existence condition for the restricted
/// problem with primary ratio mu = M/m and inner radius r.
double restricted_second_factor(const Curvature& c, double mu, double r);

}  // namespace cnb
