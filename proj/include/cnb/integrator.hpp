#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cnb/dynamics.hpp"

namespace cnb {

enum class Projection { off, position, position_velocity };

struct IntegratorOptions {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    double max_step = 0.0;  // 0 disables the cap
    Projection projection = Projection::off;
    double drift_tolerance = 1e-8;

    void validate() const;
};

/// Time series of accepted steps plus the logged first integrals and the
/// embedding-constraint residual at each sample.
struct Trajectory {
    Curvature curv;
    MassVector masses;
    bool extrinsic = false;

    std::vector<double> times;
    std::vector<PlanarState> states;      // planar view (projection for ambient runs)
    std::vector<BodyState3D> states3d;    // filled for ambient runs
    std::vector<ConservedQuantities> logs;
    std::vector<double> residuals;

    std::size_t size() const { return times.size(); }
};

/// Integrates the reduced planar system with an adaptive embedded
/// Runge-Kutta 5(4) pair. Samples are the accepted steps; the end time is
/// hit exactly. A degenerate span returns the single initial sample.
Trajectory integrate(const Curvature& c, const MassVector& m, const PlanarState& s0,
                     std::pair<double, double> t_span, const IntegratorOptions& opts = {});

/// Same scheme on the ambient system. With projection enabled, each accepted
/// step is re-projected onto the constraint surface (positions radially onto
/// the quadric, then the constraint-normal velocity component removed).
/// Aborts with drift_error once the constraint residual exceeds
/// opts.drift_tolerance.
Trajectory integrate_extrinsic(const Curvature& c, const MassVector& m, const BodyState3D& s0,
                               std::pair<double, double> t_span,
                               const IntegratorOptions& opts = {});

struct DriftReport {
    double energy = 0.0;
    double c3 = 0.0;
    double constraint = 0.0;
};

/// (max |h(t)-h(0)|, max |c3(t)-c3(0)|, max constraint residual) over the run.
DriftReport drift_report(const Trajectory& t);

/// Largest |rho_ij(t) - rho_ij(0)| over pairs and samples.
double max_rho_drift(const Trajectory& t);

/// Keeps at most max_rows samples (first and last always retained).
Trajectory thin(const Trajectory& t, std::size_t max_rows);

/// CSV schema: t,x1,y1,x2,y2,x3,y3,xdot1,ydot1,xdot2,ydot2,xdot3,ydot3,
/// h,c1,c2,c3,maxres. A "# config_hash=..." comment precedes the header when
/// a hash is supplied.
void write_trajectory_csv(std::ostream& os, const Trajectory& t,
                          const std::string& config_hash = {});

}  // namespace cnb
