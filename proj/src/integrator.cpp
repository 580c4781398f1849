#include "cnb/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cnb/errors.hpp"
#include "cnb/util.hpp"

namespace cnb {

void IntegratorOptions::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw config_error("integrator tolerances must be positive");
    if (max_step < 0.0 || !std::isfinite(max_step))
        throw config_error("max_step must be finite and nonnegative");
    if (!(drift_tolerance > 0.0)) throw config_error("drift_tolerance must be positive");
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784,  11.0 / 84,  0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

template <std::size_t N>
using State = std::array<double, N>;

// One trial step; returns false when the derivative evaluation failed
// (guard tripped on a trial state) so the controller can shrink.
template <std::size_t N, class Rhs>
bool dopri_step(const Rhs& rhs, double t, const State<N>& y, double h, State<N>& y5,
                double& err_norm, double rel_tol, double abs_tol) {
    std::array<State<N>, 7> k;
    if (!rhs(t, y, k[0])) return false;
    State<N> tmp;
    for (int stage = 1; stage < 7; ++stage) {
        for (std::size_t n = 0; n < N; ++n) {
            double acc = 0.0;
            for (int j = 0; j < stage; ++j) acc += kA[stage][j] * k[j][n];
            tmp[n] = y[n] + h * acc;
        }
        if (!rhs(t + kC[stage] * h, tmp, k[stage])) return false;
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        double acc5 = 0.0, acc4 = 0.0;
        for (int j = 0; j < 7; ++j) {
            acc5 += kB5[j] * k[j][n];
            acc4 += kB4[j] * k[j][n];
        }
        y5[n] = y[n] + h * acc5;
        const double e = h * (acc5 - acc4);
        const double sc = abs_tol + rel_tol * std::max(std::fabs(y[n]), std::fabs(y5[n]));
        sum += (e / sc) * (e / sc);
    }
    err_norm = std::sqrt(sum / static_cast<double>(N));
    return std::isfinite(err_norm);
}

template <std::size_t N, class Rhs, class Accept>
void dopri_integrate(const Rhs& rhs, State<N> y, double t0, double t1,
                     const IntegratorOptions& opts, const Accept& accept) {
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::fabs(t1 - t0);
    double h_cap = (opts.max_step > 0.0) ? opts.max_step : span;

    // crude initial step from the derivative magnitude; the controller
    // corrects it within a few steps
    State<N> f0;
    if (!rhs(t0, y, f0)) throw singularity_error("initial state fails a dynamics guard");
    double ynorm = 0.0, fnorm = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        ynorm = std::max(ynorm, std::fabs(y[n]));
        fnorm = std::max(fnorm, std::fabs(f0[n]));
    }
    double h = 0.01 * (ynorm + 1.0) / (fnorm + 1.0);
    h = std::min({h, h_cap, span});
    h = std::max(h, span * 1e-12);

    double t = t0;
    while (dir * (t1 - t) > 0.0) {
        h = std::min(h, h_cap);
        if (dir * (t + dir * h - t1) > 0.0) h = std::fabs(t1 - t);
        const double h_signed = dir * h;

        State<N> y_next;
        double err = 0.0;
        const bool ok = dopri_step<N>(rhs, t, y, h_signed, y_next, err, opts.rel_tol, opts.abs_tol);

        if (ok && err <= 1.0) {
            const double t_next = (std::fabs(t + h_signed - t1) < 1e-14 * std::max(1.0, std::fabs(t1)))
                                      ? t1
                                      : t + h_signed;
            t = t_next;
            y = y_next;
            accept(t, y);
            double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
        } else {
            const double factor = ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25;
            h *= factor;
        }
        if (h < 1e-14 * std::max(1.0, std::fabs(t)))
            throw singularity_error("step size underflow near a singular configuration");
    }
}

State<12> pack_planar(const PlanarState& s) {
    State<12> y;
    for (int i = 0; i < 3; ++i) {
        y[2 * i] = s.pos[i].x;
        y[2 * i + 1] = s.pos[i].y;
        y[6 + 2 * i] = s.vel[i].x;
        y[6 + 2 * i + 1] = s.vel[i].y;
    }
    return y;
}

PlanarState unpack_planar(const State<12>& y) {
    PlanarState s;
    for (int i = 0; i < 3; ++i) {
        s.pos[i] = {y[2 * i], y[2 * i + 1]};
        s.vel[i] = {y[6 + 2 * i], y[6 + 2 * i + 1]};
    }
    return s;
}

State<18> pack_extrinsic(const BodyState3D& s) {
    State<18> y;
    for (int i = 0; i < 3; ++i) {
        y[3 * i] = s.pos[i].x;
        y[3 * i + 1] = s.pos[i].y;
        y[3 * i + 2] = s.pos[i].z;
        y[9 + 3 * i] = s.vel[i].x;
        y[9 + 3 * i + 1] = s.vel[i].y;
        y[9 + 3 * i + 2] = s.vel[i].z;
    }
    return y;
}

BodyState3D unpack_extrinsic(const State<18>& y) {
    BodyState3D s;
    for (int i = 0; i < 3; ++i) {
        s.pos[i] = {y[3 * i], y[3 * i + 1], y[3 * i + 2]};
        s.vel[i] = {y[9 + 3 * i], y[9 + 3 * i + 1], y[9 + 3 * i + 2]};
    }
    return s;
}

// Radial rescaling onto the quadric about the common center (0,0,-|kappa|^{-1/2}),
// then removal of the constraint-normal velocity component.
void project_body(const Curvature& c, Point3& p, Point3& v, Projection mode) {
    if (c.flat() || mode == Projection::off) return;
    const double sg = c.sigma();
    const double rbar = c.radius();
    const double zs = p.z + rbar;
    const double q2 = p.x * p.x + p.y * p.y + sg * zs * zs;
    if (!(sg * q2 > 0.0)) throw chart_error("projection failed: state left the quadric's domain");
    const double scale = rbar / std::sqrt(sg * q2);
    p.x *= scale;
    p.y *= scale;
    p.z = scale * zs - rbar;

    if (mode == Projection::position_velocity) {
        const double sk = c.sqrt_abs();
        const double wx = c.kappa * p.x;
        const double wy = c.kappa * p.y;
        const double wz = c.kappa * sg * p.z + sk;
        const double norm2 = wx * wx + wy * wy + wz * wz;
        if (norm2 > 0.0) {
            const double lam = (wx * v.x + wy * v.y + wz * v.z) / norm2;
            v.x -= lam * wx;
            v.y -= lam * wy;
            v.z -= lam * wz;
        }
    }
}

}  // namespace

Trajectory integrate(const Curvature& c, const MassVector& m, const PlanarState& s0,
                     std::pair<double, double> t_span, const IntegratorOptions& opts) {
    opts.validate();
    accel_reduced(c, m, s0);  // initial guard check

    Trajectory tr;
    tr.curv = c;
    tr.masses = m;
    tr.extrinsic = false;

    auto log_sample = [&](double t, const PlanarState& s) {
        tr.times.push_back(t);
        tr.states.push_back(s);
        tr.logs.push_back(angular_momenta(c, m, s));
        tr.residuals.push_back(max_constraint_residual(c, lift_state(c, s)));
    };
    log_sample(t_span.first, s0);
    if (t_span.first == t_span.second) return tr;

    auto rhs = [&](double, const State<12>& y, State<12>& dy) -> bool {
        try {
            const PlanarState s = unpack_planar(y);
            const auto acc = accel_reduced(c, m, s);
            for (int i = 0; i < 3; ++i) {
                dy[2 * i] = s.vel[i].x;
                dy[2 * i + 1] = s.vel[i].y;
                dy[6 + 2 * i] = acc[i].x;
                dy[6 + 2 * i + 1] = acc[i].y;
            }
            return true;
        } catch (const error&) {
            return false;
        }
    };
    dopri_integrate<12>(rhs, pack_planar(s0), t_span.first, t_span.second, opts,
                        [&](double t, const State<12>& y) { log_sample(t, unpack_planar(y)); });
    return tr;
}

Trajectory integrate_extrinsic(const Curvature& c, const MassVector& m, const BodyState3D& s0,
                               std::pair<double, double> t_span, const IntegratorOptions& opts) {
    opts.validate();

    BodyState3D start = s0;
    for (int i = 0; i < 3; ++i) project_body(c, start.pos[i], start.vel[i], opts.projection);
    if (max_constraint_residual(c, start) > 1e-8)
        throw domain_error("initial state violates the embedding constraints; "
                           "enable projection or fix the input");
    accel_extrinsic(c, m, start);  // initial guard check

    Trajectory tr;
    tr.curv = c;
    tr.masses = m;
    tr.extrinsic = true;

    auto log_sample = [&](double t, const BodyState3D& s) {
        tr.times.push_back(t);
        tr.states3d.push_back(s);
        tr.states.push_back(planar_projection(s));
        tr.logs.push_back(conserved_extrinsic(c, m, s));
        const double res = max_constraint_residual(c, s);
        tr.residuals.push_back(res);
        if (res > opts.drift_tolerance)
            throw drift_error("constraint drift exceeded drift_tolerance");
    };
    log_sample(t_span.first, start);
    if (t_span.first == t_span.second) return tr;

    auto rhs = [&](double, const State<18>& y, State<18>& dy) -> bool {
        try {
            const BodyState3D s = unpack_extrinsic(y);
            const auto acc = accel_extrinsic(c, m, s);
            for (int i = 0; i < 3; ++i) {
                dy[3 * i] = s.vel[i].x;
                dy[3 * i + 1] = s.vel[i].y;
                dy[3 * i + 2] = s.vel[i].z;
                dy[9 + 3 * i] = acc[i].x;
                dy[9 + 3 * i + 1] = acc[i].y;
                dy[9 + 3 * i + 2] = acc[i].z;
            }
            return true;
        } catch (const error&) {
            return false;
        }
    };
    dopri_integrate<18>(rhs, pack_extrinsic(start), t_span.first, t_span.second, opts,
                        [&](double t, State<18>& y) {
                            BodyState3D s = unpack_extrinsic(y);
                            for (int i = 0; i < 3; ++i)
                                project_body(c, s.pos[i], s.vel[i], opts.projection);
                            y = pack_extrinsic(s);
                            log_sample(t, s);
                        });
    return tr;
}

DriftReport drift_report(const Trajectory& t) {
    if (t.size() == 0) throw domain_error("drift report of an empty trajectory");
    DriftReport rep;
    const double h0 = t.logs.front().h;
    const double c30 = t.logs.front().c3;
    for (std::size_t k = 0; k < t.size(); ++k) {
        rep.energy = std::max(rep.energy, std::fabs(t.logs[k].h - h0));
        rep.c3 = std::max(rep.c3, std::fabs(t.logs[k].c3 - c30));
        rep.constraint = std::max(rep.constraint, t.residuals[k]);
    }
    return rep;
}

double max_rho_drift(const Trajectory& t) {
    if (t.size() == 0) throw domain_error("rho drift of an empty trajectory");
    auto pair_rho = [&](std::size_t k, int i, int j) {
        if (t.extrinsic) {
            const auto& s = t.states3d[k];
            const double dx = s.pos[i].x - s.pos[j].x;
            const double dy = s.pos[i].y - s.pos[j].y;
            const double dz = s.pos[i].z - s.pos[j].z;
            return std::sqrt(std::max(dx * dx + dy * dy + t.curv.sigma() * dz * dz, 0.0));
        }
        return std::sqrt(chord_distance_sq(t.curv, t.states[k].pos[i], t.states[k].pos[j]));
    };
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double rho0 = pair_rho(0, i, j);
            for (std::size_t k = 1; k < t.size(); ++k)
                worst = std::max(worst, std::fabs(pair_rho(k, i, j) - rho0));
        }
    return worst;
}

Trajectory thin(const Trajectory& t, std::size_t max_rows) {
    if (max_rows == 0 || t.size() <= max_rows) return t;
    Trajectory out;
    out.curv = t.curv;
    out.masses = t.masses;
    out.extrinsic = t.extrinsic;
    const std::size_t last = t.size() - 1;
    const double stride = static_cast<double>(last) / static_cast<double>(max_rows - 1);
    std::size_t prev = static_cast<std::size_t>(-1);
    for (std::size_t r = 0; r < max_rows; ++r) {
        std::size_t k = std::min(last, static_cast<std::size_t>(std::lround(stride * r)));
        if (r + 1 == max_rows) k = last;
        if (k == prev) continue;
        prev = k;
        out.times.push_back(t.times[k]);
        out.states.push_back(t.states[k]);
        if (t.extrinsic) out.states3d.push_back(t.states3d[k]);
        out.logs.push_back(t.logs[k]);
        out.residuals.push_back(t.residuals[k]);
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t, const std::string& config_hash) {
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
    os << "t,x1,y1,x2,y2,x3,y3,xdot1,ydot1,xdot2,ydot2,xdot3,ydot3,h,c1,c2,c3,maxres\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        os << format_double(t.times[k]);
        for (int i = 0; i < 3; ++i)
            os << ',' << format_double(t.states[k].pos[i].x) << ','
               << format_double(t.states[k].pos[i].y);
        for (int i = 0; i < 3; ++i)
            os << ',' << format_double(t.states[k].vel[i].x) << ','
               << format_double(t.states[k].vel[i].y);
        os << ',' << format_double(t.logs[k].h) << ',' << format_double(t.logs[k].c1) << ','
           << format_double(t.logs[k].c2) << ',' << format_double(t.logs[k].c3) << ','
           << format_double(t.residuals[k]) << "\n";
    }
}

}  // namespace cnb
