#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cnb/equilibria.hpp"
#include "cnb/errors.hpp"
#include "cnb/integrator.hpp"
#include "support.hpp"

using namespace cnb;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Independent root oracle: sign changes of the cubic
// 4 g s^3 + 4 g s^2 + (4 - 5 g) s - 3 g + 2 on a dense grid, refined by
// bisection on the polynomial itself. Excludes the removable point -1/2 and
// the rejected endpoint 0.
std::vector<double> cubic_roots_oracle(double gamma) {
    auto p = [&](double s) {
        return ((4.0 * gamma * s + 4.0 * gamma) * s + (4.0 - 5.0 * gamma)) * s - 3.0 * gamma + 2.0;
    };
    std::vector<double> roots;
    const int n = 400000;
    double prev_s = -1.0 + 1e-9;
    double prev_p = p(prev_s);
    for (int k = 1; k <= n; ++k) {
        const double s = -1.0 + 1e-9 + (1.0 - 2e-9) * k / n;
        const double ps = p(s);
        if ((prev_p < 0.0) != (ps < 0.0)) {
            double a = prev_s, b = s;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (a + b);
                if ((p(a) < 0.0) != (p(mid) < 0.0))
                    b = mid;
                else
                    a = mid;
            }
            const double root = 0.5 * (a + b);
            if (std::fabs(root + 0.5) > 1e-7 && root < -1e-7) roots.push_back(root);
        }
        prev_s = s;
        prev_p = ps;
    }
    return roots;
}

ReCandidate classical_lagrange(const MassVector& m, double side) {
    // equilateral triangle in the plane, barycentric placement,
    // alpha^2 = (m1+m2+m3)/side^3
    const double r = side / std::sqrt(3.0);
    double vx[3], vy[3];
    for (int i = 0; i < 3; ++i) {
        vx[i] = r * std::cos(2.0 * kPi * i / 3.0);
        vy[i] = r * std::sin(2.0 * kPi * i / 3.0);
    }
    const double M = m.total();
    double cx = 0.0, cy = 0.0;
    for (int i = 0; i < 3; ++i) {
        cx += m[i] * vx[i] / M;
        cy += m[i] * vy[i] / M;
    }
    ReCandidate cand;
    cand.family = Family::lagrange_equal_mass;
    cand.kappa = 0.0;
    cand.masses = m;
    for (int i = 0; i < 3; ++i) {
        cand.radii[i] = std::hypot(vx[i] - cx, vy[i] - cy);
        cand.phases[i] = std::atan2(vy[i] - cy, vx[i] - cx);
    }
    cand.alpha = std::sqrt(M / (side * side * side));
    return cand;
}

}  // namespace

TEST_CASE("shape curve F: pinned values and limits") {
    CHECK(f_of_s(-0.25) == doctest::Approx(0.64).epsilon(1e-15));
    CHECK(std::fabs(f_of_s(-1.0 + 1e-13) - 1.0) <= 1e-12);
    CHECK(std::fabs(f_of_s(-1e-13) - 2.0 / 3.0) <= 1e-12);
    CHECK_THROWS_AS(f_of_s(-0.5), domain_error);
    CHECK_THROWS_AS(f_of_s(0.0), domain_error);
    CHECK_THROWS_AS(f_of_s(-1.0), domain_error);
    CHECK_THROWS_AS(f_of_s(0.3), domain_error);
}

TEST_CASE("shape curve F: factored form matches the raw rational form") {
    for (double s = -0.999; s < -0.001; s += 0.0007) {
        if (std::fabs(s + 0.5) < 1e-3) continue;
        const double raw = -(4.0 * s + 2.0) / (((4.0 * s + 4.0) * s - 5.0) * s - 3.0);
        CHECK(std::fabs(f_of_s(s) - raw) <= 1e-12 * (1.0 + std::fabs(raw)));
    }
}

TEST_CASE("isosceles shapes at a latitude: counts and the cubic oracle") {
    // pinned cases
    const auto at_min = isosceles_shapes_at_latitude(16.0 / 25.0);
    REQUIRE(at_min.size() == 1);
    CHECK(at_min[0] == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(isosceles_shapes_at_latitude(0.5).empty());

    const auto two = isosceles_shapes_at_latitude(0.65);
    REQUIRE(two.size() == 2);
    CHECK(two[0] < -0.25);
    CHECK(two[1] > -0.25);

    // cross-check against the independent cubic-root oracle
    for (double gamma : {0.62, 0.645, 0.655, 0.664, 0.67, 0.75, 0.9, 0.99}) {
        const auto mine = isosceles_shapes_at_latitude(gamma);
        const auto oracle = cubic_roots_oracle(gamma);
        REQUIRE(mine.size() == oracle.size());
        for (std::size_t k = 0; k < mine.size(); ++k)
            CHECK(mine[k] == doctest::Approx(oracle[k]).epsilon(1e-9));
    }
}

TEST_CASE("root-count law over stratified latitudes") {
    // count keyed on d = sqrt(1-gamma): one shape for d in (0, sqrt(3)/3],
    // two for d in (sqrt(3)/3, 3/5), one at d = 3/5, none beyond
    const double d_lo = std::sqrt(3.0) / 3.0;
    const double d_hi = 3.0 / 5.0;
    for (int k = 0; k < 200; ++k) {
        const double gamma = (k + 0.5) / 200.0;
        const double d = std::sqrt(1.0 - gamma);
        const std::size_t count = isosceles_shapes_at_latitude(gamma).size();
        std::size_t expected = 0;
        if (d <= d_lo)
            expected = 1;
        else if (d < d_hi)
            expected = 2;
        else if (std::fabs(d - d_hi) < 1e-12)
            expected = 1;
        CHECK(count == expected);
    }
}

TEST_CASE("mass-ratio round trip through the latitude") {
    for (double gamma : {0.645, 0.66, 0.7, 0.8, 0.95}) {
        for (double s : isosceles_shapes_at_latitude(gamma)) {
            const double ratio = -2.0 * s;  // M/m
            const IsoscelesSolution sol = isosceles_solution(ratio, 1.0, Hemisphere::north);
            CHECK(std::fabs(sol.gamma - gamma) <= 1e-10);
        }
    }
}

TEST_CASE("isosceles family: pinned shape data and build verification") {
    // M/m = 1/2: s = -1/4, gamma = 16/25, circle 3/5 of a radius off the equator
    const IsoscelesSolution north = isosceles_solution(0.5, 1.0, Hemisphere::north);
    CHECK(north.s == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(north.gamma == doctest::Approx(0.64).epsilon(1e-14));
    CHECK(north.lambda == doctest::Approx(0.4).epsilon(1e-13));
    const IsoscelesSolution south = isosceles_solution(0.5, 1.0, Hemisphere::south);
    CHECK(south.lambda == doctest::Approx(1.6).epsilon(1e-13));

    const Curvature c{1.0};
    const ReCandidate cand =
        isosceles_re_build(c, 0.5, 1.0, Hemisphere::north, Branch::inner, +1);
    CHECK(re_residual(c, cand.masses, cand) <= 1e-10);

    // hemisphere symmetry: same planar data, same angular velocity
    const ReCandidate mirror =
        isosceles_re_build(c, 0.5, 1.0, Hemisphere::south, Branch::inner, +1);
    CHECK(mirror.alpha2() == doctest::Approx(cand.alpha2()).epsilon(1e-14));
    CHECK(north.lambda + south.lambda == doctest::Approx(2.0).epsilon(1e-14));

    // reversed orientation is a relabeling with the same residual
    const ReCandidate outer =
        isosceles_re_build(c, 0.5, 1.0, Hemisphere::north, Branch::outer, -1);
    CHECK(re_residual(c, outer.masses, outer) <= 1e-10);
    CHECK(outer.alpha == doctest::Approx(-cand.alpha).epsilon(1e-14));
}

TEST_CASE("isosceles family: mass-constraint rejections") {
    const Curvature c{1.0};
    CHECK_THROWS_AS(isosceles_re_build(c, 1.0, 1.0, Hemisphere::north, Branch::inner, 1),
                    family_error);
    CHECK_THROWS_AS(isosceles_re_build(c, 3.0, 1.0, Hemisphere::north, Branch::inner, 1),
                    family_error);
    CHECK_THROWS_AS(isosceles_re_build(c, 2.0, 1.0, Hemisphere::north, Branch::inner, 1),
                    family_error);
    CHECK_THROWS_AS(
        isosceles_re_build(Curvature{-1.0}, 0.5, 1.0, Hemisphere::north, Branch::inner, 1),
        family_error);
}

TEST_CASE("equal-mass circles: spherical, equatorial and hyperbolic") {
    const Curvature sphere{1.0};
    // equator: reproducible through the equatorial constructor
    const ReCandidate eq = lagrange_equal_mass_build(sphere, 1.0, 1.0, +1);
    CHECK(re_residual(sphere, eq.masses, eq) <= 1e-10);
    const ReCandidate eq2 =
        equatorial_re_build(sphere, 0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0, eq.alpha);
    CHECK(re_residual(sphere, eq2.masses, eq2) <= 1e-10);
    for (int i = 0; i < 3; ++i)
        CHECK(eq2.radii[i] == doctest::Approx(eq.radii[i]).epsilon(1e-14));

    // mirror circles share the angular velocity
    const ReCandidate north = lagrange_equal_mass_build(sphere, 1.0, 0.4, +1);
    const ReCandidate south = lagrange_equal_mass_build(sphere, 1.0, 1.6, +1);
    CHECK(north.alpha2() == doctest::Approx(south.alpha2()).epsilon(1e-13));

    // hyperbolic circles exist for every height
    const Curvature hyp{-1.0};
    for (double v : {0.2, 1.0, 3.0}) {
        const ReCandidate cand = lagrange_equal_mass_build(hyp, 1.0, v, +1);
        CHECK(re_residual(hyp, cand.masses, cand) <= 1e-10);
    }

    CHECK_THROWS_AS(lagrange_equal_mass_build(sphere, 1.0, 2.5, 1), family_error);
    CHECK_THROWS_AS(lagrange_equal_mass_build(Curvature{0.0}, 1.0, 0.5, 1), family_error);
}

TEST_CASE("equatorial masses from angles") {
    const Curvature c{1.0};
    // symmetric triple forces equal masses
    {
        const auto [m, gamma] =
            equatorial_masses_from_angles(c, 0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0);
        (void)gamma;
        CHECK(m.m1 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.m2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.m3 == doctest::Approx(1.0).epsilon(1e-12));
    }
    // acute scalene: positive masses, tangential system solved to rounding
    {
        const auto [m, gamma] = equatorial_masses_from_angles(c, 0.0, 1.9, 4.0);
        CHECK(m.m1 > 0.0);
        CHECK(m.m3 > 0.0);
        auto s_of = [&](double d) {
            const double sn = std::sin(d);
            return sn / (std::fabs(sn) * sn * sn);
        };
        const double s1 = s_of(0.0 - 1.9), s2 = s_of(1.9 - 4.0), s3 = s_of(4.0 - 0.0);
        CHECK(std::fabs(m.m1 * s1 - m.m3 * s2) <= 1e-12);
        CHECK(std::fabs(-m.m2 * s1 + m.m3 * s3) <= 1e-12);
        CHECK(std::fabs(m.m2 * s2 - m.m1 * s3) <= 1e-12);
        CHECK(gamma == doctest::Approx(s3).epsilon(1e-15));
    }
    // obtuse triple: no positive-mass solution
    CHECK_THROWS_AS(equatorial_masses_from_angles(c, 0.0, 0.5, 4.0), family_error);
}

TEST_CASE("equatorial candidates work for any angular velocity") {
    const Curvature c{1.0};
    for (double alpha : {0.1, 1.0, 10.0}) {
        const ReCandidate cand = equatorial_re_build(c, 0.0, 1.9, 4.0, alpha);
        CHECK(re_residual(c, cand.masses, cand) <= 1e-10);
    }
}

TEST_CASE("planetary family: flat, spherical, hyperbolic") {
    // flat case: theta = pi/3 and the circular Kepler rate
    const ReCandidate flat = planetary_re_build(Curvature{0.0}, 1.0, 1.0, +1);
    CHECK(std::cos(flat.theta) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(flat.alpha2() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(re_residual(Curvature{0.0}, flat.masses, flat) <= 1e-10);

    // spherical: frozen closed-form value at kappa = 1, r = 1/2
    const ReCandidate sph = planetary_re_build(Curvature{1.0}, 1.0, 0.5, +1);
    const double w = std::sqrt(0.75);
    const double expected = (0.75 + w) / (0.125 * 0.75 * (1.0 + w));
    CHECK(sph.alpha2() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(re_residual(Curvature{1.0}, sph.masses, sph) <= 1e-10);

    // hyperbolic: exists and verifies
    const ReCandidate hyp = planetary_re_build(Curvature{-1.0}, 1.0, 1.0, +1);
    CHECK(re_residual(Curvature{-1.0}, hyp.masses, hyp) <= 1e-10);

    CHECK_THROWS_AS(planetary_re_build(Curvature{1.0}, 1.0, 1.0, 1), family_error);
    CHECK_THROWS_AS(planetary_re_build(Curvature{1.0}, 1.0, -0.1, 1), family_error);
}

TEST_CASE("equal-primary restricted family: closed forms") {
    const ReCandidate cand = restricted_equalmass_re_build(Curvature{1.0}, 1.0, +1);
    CHECK(cand.radii[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(cand.radii[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cand.theta == doctest::Approx(0.5 * kPi).epsilon(1e-15));
    CHECK(cand.alpha2() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(re_residual(Curvature{1.0}, cand.masses, cand) <= 1e-10);

    // geometry scales with curvature, angular velocity with mass and curvature
    const ReCandidate scaled = restricted_equalmass_re_build(Curvature{4.0}, 1.0, +1);
    CHECK(scaled.radii[0] == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(scaled.alpha2() == doctest::Approx(16.0).epsilon(1e-13));
    CHECK(re_residual(Curvature{4.0}, scaled.masses, scaled) <= 1e-10);

    const ReCandidate heavier = restricted_equalmass_re_build(Curvature{1.0}, 2.0, +1);
    CHECK(heavier.radii[0] == doctest::Approx(cand.radii[0]).epsilon(1e-15));
    CHECK(heavier.alpha2() == doctest::Approx(4.0).epsilon(1e-14));

    CHECK_THROWS_AS(restricted_equalmass_re_build(Curvature{-1.0}, 1.0, 1), family_error);
    CHECK_THROWS_AS(restricted_equalmass_re_build(Curvature{0.0}, 1.0, 1), family_error);
}

TEST_CASE("residual verifier: detects de-tuned candidates, passes classical ones") {
    const Curvature c{1.0};
    ReCandidate cand = restricted_equalmass_re_build(c, 1.0, +1);
    // inflate the primary circle by 10%: clearly not an equilibrium anymore
    cand.radii[0] *= 1.1;
    cand.radii[1] *= 1.1;
    CHECK(re_residual(c, cand.masses, cand) > 1e-3);

    // classical flat equilateral rotation, also with unequal masses
    const ReCandidate equal = classical_lagrange(MassVector{1.0, 1.0, 1.0}, 1.0);
    CHECK(re_residual(Curvature{0.0}, equal.masses, equal) <= 1e-10);
    const ReCandidate unequal = classical_lagrange(MassVector{1.0, 2.0, 3.0}, 1.3);
    CHECK(re_residual(Curvature{0.0}, unequal.masses, unequal) <= 1e-10);
}

TEST_CASE("built candidates stay rigid under integration") {
    const Curvature hyp{-1.0};
    const ReCandidate cand = lagrange_equal_mass_build(hyp, 1.0, 0.5, +1);
    IntegratorOptions opts;
    opts.projection = Projection::position_velocity;
    const double T = rotation_period(cand);
    const Trajectory t = integrate_extrinsic(
        hyp, cand.masses, lift_state(hyp, instantiate(cand)), {0.0, 3.0 * T}, opts);
    CHECK(max_rho_drift(t) <= 1e-6);
}

TEST_CASE("candidate JSON round trip") {
    const ReCandidate cand = restricted_equalmass_re_build(Curvature{2.0}, 1.5, -1);
    const ReCandidate back = candidate_from_json(candidate_to_json(cand));
    CHECK(back.family == cand.family);
    CHECK(back.kappa == cand.kappa);
    CHECK(back.alpha == cand.alpha);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.radii[i] == cand.radii[i]);
        CHECK(back.phases[i] == cand.phases[i]);
        CHECK(back.masses[i] == cand.masses[i]);
    }
    CHECK_THROWS_AS(candidate_from_json(nlohmann::json{{"family", "planetary"}}), config_error);
}

TEST_CASE("nonexistence scan: hemisphere confinement toward the equator") {
    ScanRequest req;
    req.scase = ScanCase::equator_hemisphere;
    req.c = Curvature{1.0};
    req.masses = MassVector{1.0, 1.0, 1.0};
    req.n1 = req.n2 = 60;
    req.margin = 0.01;
    const ScanResult res = scan_nonexistence(req);
    CHECK(res.min_residual > 1e-3);
    // the defect shrinks toward the excluded equatorial corner
    CHECK(res.argmin[0] > 0.9);
    CHECK(res.argmin[1] > 0.9);
    // margin must be positive: the corner is the solution set
    req.margin = 0.0;
    CHECK_THROWS_AS(scan_nonexistence(req), config_error);
}

TEST_CASE("nonexistence scan: hyperbolic isosceles latitudes") {
    ScanRequest req;
    req.scase = ScanCase::hyperbolic_isosceles;
    req.c = Curvature{-1.0};
    req.n1 = req.n2 = 80;
    const ScanResult res = scan_nonexistence(req);
    // the shape curve never dips below 16/25 while delta stays negative
    CHECK(res.min_residual > 16.0 / 25.0);
    ScanRequest bad = req;
    bad.c = Curvature{1.0};
    CHECK_THROWS_AS(scan_nonexistence(bad), config_error);
}

TEST_CASE("nonexistence scan: hyperbolic equal-primary identity") {
    ScanRequest req;
    req.scase = ScanCase::hyperbolic_restricted_equal;
    req.c = Curvature{-1.0};
    req.n1 = 200;
    req.r_max = 5.0;
    const ScanResult res = scan_nonexistence(req);
    CHECK(res.min_residual >= 1.0);
    // the identity's left side is negative for kappa < 0
    CHECK(hyperbolic_pair_radius_identity(Curvature{-1.0}, 1.0) < 0.0);
}

TEST_CASE("nonexistence scan: general restricted second factor") {
    ScanRequest req;
    req.scase = ScanCase::general_restricted;
    req.c = Curvature{0.01};
    req.n1 = req.n2 = 60;
    req.margin = 0.05;
    const ScanResult res = scan_nonexistence(req);
    CHECK(res.min_residual > 1e-3);
    // the factor is negative throughout the admissible grid
    for (const auto& row : res.rows) CHECK(restricted_second_factor(req.c, row[0], row[1]) < 0.0);

    // hyperbolic side as well
    ScanRequest hyp = req;
    hyp.c = Curvature{-0.5};
    hyp.r_max = 3.0;
    const ScanResult res_h = scan_nonexistence(hyp);
    CHECK(res_h.min_residual > 1e-3);
}

TEST_CASE("scalene parallel scan reports positive defects away from isosceles triples") {
    ScanRequest req;
    req.scase = ScanCase::scalene_parallel;
    req.c = Curvature{1.0};
    req.n1 = 6;
    req.n2 = 12;
    req.margin = 0.05;
    const ScanResult res = scan_nonexistence(req);
    CHECK(res.rows.size() > 100);
    CHECK(res.min_residual >= 0.0);
    CHECK(res.param_names.size() == 3);
}

TEST_CASE("family names parse with aliases") {
    CHECK(family_from_name("restricted-equal-mass") == Family::restricted_equal_mass);
    CHECK(family_from_name("isosceles") == Family::isosceles_band);
    CHECK(family_from_name("lagrange") == Family::lagrange_equal_mass);
    CHECK_THROWS_AS(family_from_name("euler"), config_error);
}
