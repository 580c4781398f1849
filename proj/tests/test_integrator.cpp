#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cnb/errors.hpp"
#include "cnb/integrator.hpp"
#include "support.hpp"

using namespace cnb;
using namespace testsup;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Two unit masses at (+-1/2, 0) on a circular orbit, a massless probe resting
// at the center where the pulls cancel. Period 2*pi/sqrt(2).
PlanarState circular_two_body() {
    PlanarState s;
    const double v = 0.5 * std::sqrt(2.0);
    s.pos[0] = {-0.5, 0.0};
    s.pos[1] = {0.5, 0.0};
    s.pos[2] = {0.0, 0.0};
    s.vel[0] = {0.0, -v};
    s.vel[1] = {0.0, v};
    return s;
}
const MassVector kTwoBody{1.0, 1.0, 0.0};
const double kPeriod = 2.0 * kPi / std::sqrt(2.0);
}  // namespace

TEST_CASE("zero-length span returns the single initial sample") {
    const PlanarState s0 = circular_two_body();
    const Trajectory t = integrate(Curvature{0.0}, kTwoBody, s0, {2.0, 2.0});
    REQUIRE(t.size() == 1);
    CHECK(t.times[0] == 2.0);
    CHECK(state_distance(t.states[0], s0) == 0.0);

    const DriftReport rep = drift_report(t);
    CHECK(rep.energy == 0.0);
    CHECK(rep.c3 == 0.0);
    CHECK(rep.constraint <= 1e-12);
}

TEST_CASE("flat circular orbit closes after one period") {
    const PlanarState s0 = circular_two_body();
    const Trajectory t = integrate(Curvature{0.0}, kTwoBody, s0, {0.0, kPeriod});
    CHECK(state_distance(t.states.back(), s0) <= 1e-6);
    const DriftReport rep = drift_report(t);
    CHECK(rep.energy <= 1e-8);
    CHECK(rep.c3 <= 1e-8);
}

TEST_CASE("time reversal returns to the start") {
    const PlanarState s0 = circular_two_body();
    IntegratorOptions opts;
    const Trajectory fwd = integrate(Curvature{0.0}, kTwoBody, s0, {0.0, kPeriod}, opts);
    const Trajectory back =
        integrate(Curvature{0.0}, kTwoBody, fwd.states.back(), {kPeriod, 0.0}, opts);
    const double one_way = std::max(state_distance(fwd.states.back(), s0), 1e-10);
    CHECK(state_distance(back.states.back(), s0) <= 10.0 * one_way);
}

TEST_CASE("tightening rel_tol does not worsen the closed-orbit error") {
    const PlanarState s0 = circular_two_body();
    auto error_at = [&](double rel_tol) {
        IntegratorOptions opts;
        opts.rel_tol = rel_tol;
        opts.abs_tol = 1e-14;
        const Trajectory t = integrate(Curvature{0.0}, kTwoBody, s0, {0.0, kPeriod}, opts);
        return state_distance(t.states.back(), s0);
    };
    const double loose = error_at(1e-5);
    const double mid = error_at(1e-7);
    const double tight = error_at(1e-9);
    CHECK(mid <= loose * 1.05 + 1e-12);
    CHECK(tight <= mid * 1.05 + 1e-12);
}

TEST_CASE("drift grows no better as max_step is relaxed") {
    const PlanarState s0 = circular_two_body();
    auto drift_at = [&](double max_step) {
        IntegratorOptions opts;
        opts.rel_tol = 1e-3;  // loose, so the step cap binds
        opts.abs_tol = 1e-6;
        opts.max_step = max_step;
        const Trajectory t = integrate(Curvature{0.0}, kTwoBody, s0, {0.0, kPeriod}, opts);
        return drift_report(t).energy;
    };
    const double fine = drift_at(0.02);
    const double mid = drift_at(0.08);
    const double coarse = drift_at(0.3);
    CHECK(fine <= mid * 1.2 + 1e-15);
    CHECK(mid <= coarse * 1.2 + 1e-15);
}

TEST_CASE("looser tolerances give strictly larger drift on the same problem") {
    const PlanarState s0 = circular_two_body();
    auto drift_at = [&](double rel_tol) {
        IntegratorOptions opts;
        opts.rel_tol = rel_tol;
        opts.abs_tol = rel_tol * 1e-2;
        const Trajectory t = integrate(Curvature{0.0}, kTwoBody, s0, {0.0, 3.0 * kPeriod}, opts);
        return drift_report(t).energy;
    };
    CHECK(drift_at(1e-4) > drift_at(1e-10));
}

TEST_CASE("curved reduced runs conserve the logged integrals") {
    std::mt19937_64 rng(43);
    for (double kappa : {1.0, -1.0}) {
        const Curvature c{kappa};
        const MassVector m{1.0, 0.8, 1.2};
        const PlanarState s0 = random_planar_state(c, rng);
        const Trajectory t = integrate(c, m, s0, {0.0, 1.5});
        const DriftReport rep = drift_report(t);
        CHECK(rep.energy <= 1e-8);
        CHECK(rep.c3 <= 1e-8);
        CHECK(rep.constraint <= 1e-9);
        // c1 and c2 are integrals too
        const double c10 = t.logs.front().c1;
        const double c20 = t.logs.front().c2;
        for (const auto& q : t.logs) {
            CHECK(std::fabs(q.c1 - c10) <= 1e-8);
            CHECK(std::fabs(q.c2 - c20) <= 1e-8);
        }
    }
}

TEST_CASE("ambient integration with projection pins the constraints") {
    std::mt19937_64 rng(47);
    const Curvature c{1.0};
    const MassVector m{1.0, 1.0, 0.5};
    const PlanarState s0 = random_planar_state(c, rng);
    IntegratorOptions opts;
    opts.projection = Projection::position_velocity;
    const Trajectory t = integrate_extrinsic(c, m, lift_state(c, s0), {0.0, 1.0}, opts);
    const DriftReport rep = drift_report(t);
    CHECK(rep.constraint <= 1e-12);
    CHECK(rep.energy <= 1e-8);
    CHECK(rep.c3 <= 1e-8);

    // ambient and reduced runs land on the same final state
    const Trajectory tr = integrate(c, m, s0, {0.0, 1.0});
    CHECK(state_distance(planar_projection(t.states3d.back()), tr.states.back()) <= 1e-7);
}

TEST_CASE("collision aborts with a singularity error") {
    PlanarState s;
    s.pos[0] = {-0.5, 0.0};
    s.pos[1] = {0.5, 0.0};
    s.pos[2] = {0.0, 10.0};
    // head-on: released from rest, the pair falls into collision
    CHECK_THROWS_AS(
        integrate(Curvature{0.0}, MassVector{1.0, 1.0, 0.0}, s, {0.0, 5.0}),
        singularity_error);
}

TEST_CASE("thinning keeps endpoints and at most the requested rows") {
    const Trajectory t =
        integrate(Curvature{0.0}, kTwoBody, circular_two_body(), {0.0, kPeriod});
    REQUIRE(t.size() > 20);
    const Trajectory small = thin(t, 10);
    CHECK(small.size() <= 10);
    CHECK(small.times.front() == t.times.front());
    CHECK(small.times.back() == t.times.back());
}

TEST_CASE("trajectory CSV carries the pinned header and hash comment") {
    const Trajectory t = integrate(Curvature{0.0}, kTwoBody, circular_two_body(), {0.0, 0.5});
    std::ostringstream os;
    write_trajectory_csv(os, t, "deadbeef");
    const std::string text = os.str();
    CHECK(text.rfind("# config_hash=deadbeef\n", 0) == 0);
    CHECK(text.find("t,x1,y1,x2,y2,x3,y3,xdot1,ydot1,xdot2,ydot2,xdot3,ydot3,h,c1,c2,c3,maxres\n") !=
          std::string::npos);
}
