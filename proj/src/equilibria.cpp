#include "cnb/equilibria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cnb/errors.hpp"
#include "cnb/util.hpp"

namespace cnb {

namespace {

constexpr double kPi = std::numbers::pi;

double direction_sign(int direction) { return direction < 0 ? -1.0 : 1.0; }

// Smooth continuation of the shape curve through the removable point -1/2.
double f_smooth(double s) { return 2.0 / ((2.0 * s + 3.0) * (1.0 - s)); }

// Vertical balance on a parallel circle of squared planar radius A:
// sum_j m_j / (rho_ij (1 - kappa rho_ij^2/4)^{3/2}) = 2 alpha^2 A.
double alpha2_parallel_balance(const Curvature& c, const MassVector& m, double radius,
                               const std::array<double, 3>& phases, int i) {
    const double A = radius * radius;
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
        if (j == i || m[j] == 0.0) continue;
        const double rho2 = 2.0 * A * (1.0 - std::cos(phases[j] - phases[i]));
        const double w = 1.0 - 0.25 * c.kappa * rho2;
        if (!(rho2 > 0.0) || !(w > 0.0))
            throw singularity_error("degenerate phase configuration on the parallel circle");
        sum += m[j] / (std::sqrt(rho2) * w * std::sqrt(w));
    }
    return sum / (2.0 * A);
}

void check_built(const Curvature& c, const ReCandidate& cand) {
    const double res = re_residual(c, cand.masses, cand);
    if (!(res <= 1e-10)) {
        std::ostringstream msg;
        msg << "internal: constructed " << family_name(cand.family)
            << " candidate has residual " << res;
        throw domain_error(msg.str());
    }
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::equatorial_scalene: return "equatorial_scalene";
        case Family::isosceles_band: return "isosceles_band";
        case Family::lagrange_equal_mass: return "lagrange_equal_mass";
        case Family::planetary: return "planetary";
        case Family::restricted_equal_mass: return "restricted_equal_mass";
        case Family::general_restricted: return "general_restricted";
    }
    return "unknown";
}

Family family_from_name(const std::string& name) {
    std::string k;
    for (char ch : name) k.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(ch)));
    if (k == "equatorial_scalene" || k == "equatorial") return Family::equatorial_scalene;
    if (k == "isosceles_band" || k == "isosceles") return Family::isosceles_band;
    if (k == "lagrange_equal_mass" || k == "lagrange") return Family::lagrange_equal_mass;
    if (k == "planetary") return Family::planetary;
    if (k == "restricted_equal_mass") return Family::restricted_equal_mass;
    if (k == "general_restricted") return Family::general_restricted;
    throw config_error("unknown relative-equilibrium family: " + name);
}

const char* scan_case_name(ScanCase sc) {
    switch (sc) {
        case ScanCase::equator_hemisphere: return "equator_hemisphere";
        case ScanCase::hyperbolic_isosceles: return "hyperbolic_isosceles";
        case ScanCase::hyperbolic_restricted_equal: return "hyperbolic_restricted_equal";
        case ScanCase::general_restricted: return "general_restricted";
        case ScanCase::scalene_parallel: return "scalene_parallel";
    }
    return "unknown";
}

ScanCase scan_case_from_name(const std::string& name) {
    std::string k;
    for (char ch : name) k.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(ch)));
    if (k == "equator_hemisphere") return ScanCase::equator_hemisphere;
    if (k == "hyperbolic_isosceles") return ScanCase::hyperbolic_isosceles;
    if (k == "hyperbolic_restricted_equal") return ScanCase::hyperbolic_restricted_equal;
    if (k == "general_restricted") return ScanCase::general_restricted;
    if (k == "scalene_parallel") return ScanCase::scalene_parallel;
    throw config_error("unknown scan case: " + name);
}

double f_of_s(double s) {
    if (!(s > -1.0 && s < 0.0)) throw domain_error("F(s) is defined on (-1, 0)");
    if (s == -0.5)
        throw domain_error("F(-1/2) is 0/0: the equilateral shape fits every parallel circle");
    return f_smooth(s);
}

std::vector<double> isosceles_shapes_at_latitude(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw domain_error("latitude parameter gamma must lie in (0, 1)");
    const double eps = 1e-14;
    std::vector<double> roots;

    // decreasing branch (-1, -1/4]
    {
        const double lo = -1.0 + eps;
        const double hi = -0.25;
        if (gamma <= f_smooth(lo) && gamma >= f_smooth(hi)) {
            double a = lo, b = hi;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (mid == a || mid == b) break;
                (f_smooth(mid) >= gamma ? a : b) = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
    }
    // increasing branch [-1/4, 0); the right endpoint is the rejected
    // right-isosceles limit s -> 0
    {
        const double lo = -0.25;
        const double hi = -eps;
        if (gamma >= f_smooth(lo) && gamma <= f_smooth(hi)) {
            double a = lo, b = hi;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (mid == a || mid == b) break;
                (f_smooth(mid) <= gamma ? a : b) = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
    }
    // the branches meet at the fold point -1/4
    if (roots.size() == 2 && std::fabs(roots[0] - roots[1]) < 1e-11) roots.pop_back();
    std::sort(roots.begin(), roots.end());
    return roots;
}

IsoscelesSolution isosceles_solution(double M, double m, Hemisphere hemi) {
    if (!(M > 0.0) || !(m > 0.0)) throw family_error("isosceles family requires positive masses");
    if (!(M < 2.0 * m))
        throw family_error("isosceles family requires M < 2m for the apex mass M");
    if (M == m)
        throw family_error(
            "equal masses give the equilateral family on every parallel circle; "
            "use the equal-mass builder");
    IsoscelesSolution sol;
    sol.mass_ratio = M / m;
    sol.s = -0.5 * sol.mass_ratio;
    sol.a = std::acos(sol.s);
    sol.gamma = f_of_s(sol.s);
    const double d = std::sqrt(1.0 - sol.gamma);
    sol.lambda = (hemi == Hemisphere::north) ? 1.0 - d : 1.0 + d;
    return sol;
}

ReCandidate isosceles_re_build(const Curvature& c, double M, double m, Hemisphere hemi,
                               Branch branch, int direction) {
    if (!c.spherical())
        throw family_error("the isosceles band exists only on spheres (kappa > 0)");
    const IsoscelesSolution sol = isosceles_solution(M, m, hemi);

    ReCandidate cand;
    cand.family = Family::isosceles_band;
    cand.kappa = c.kappa;
    cand.masses = {M, m, m};
    const double radius = std::sqrt(sol.gamma / c.kappa);
    cand.radii = {radius, radius, radius};
    cand.phases = (branch == Branch::inner)
                      ? std::array<double, 3>{0.0, sol.a, 2.0 * kPi - sol.a}
                      : std::array<double, 3>{0.0, 2.0 * kPi - sol.a, sol.a};
    cand.theta = sol.a;
    cand.alpha =
        direction_sign(direction) * std::sqrt(alpha2_parallel_balance(c, cand.masses, radius,
                                                                      cand.phases, 0));
    check_built(c, cand);
    return cand;
}

ReCandidate lagrange_equal_mass_build(const Curvature& c, double m, double lambda_or_v,
                                      int direction) {
    if (c.flat())
        throw family_error(
            "the parallel-circle parameterization needs kappa != 0; the flat equilateral "
            "rotation is alpha^2 = 3m/d^3 for any side d");
    if (!(m > 0.0)) throw family_error("equal-mass family requires a positive mass");

    double planar_sq = 0.0;
    if (c.spherical()) {
        if (!(lambda_or_v > 0.0 && lambda_or_v < 2.0))
            throw family_error("circle parameter lambda must lie in (0, 2)");
        planar_sq = lambda_or_v * (2.0 - lambda_or_v) / c.kappa;
    } else {
        if (!(lambda_or_v > 0.0)) throw family_error("circle height v must be positive");
        planar_sq = parallel_radius_sq(c, lambda_or_v);
    }

    ReCandidate cand;
    cand.family = Family::lagrange_equal_mass;
    cand.kappa = c.kappa;
    cand.masses = {m, m, m};
    const double radius = std::sqrt(planar_sq);
    cand.radii = {radius, radius, radius};
    cand.phases = {0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
    cand.theta = 2.0 * kPi / 3.0;
    cand.alpha =
        direction_sign(direction) * std::sqrt(alpha2_parallel_balance(c, cand.masses, radius,
                                                                      cand.phases, 0));
    check_built(c, cand);
    return cand;
}

std::pair<MassVector, double> equatorial_masses_from_angles(const Curvature& c, double a1,
                                                            double a2, double a3) {
    if (!c.spherical()) throw family_error("equatorial equilibria require kappa > 0");
    const double k32 = c.kappa * c.sqrt_abs();
    auto s_of = [&](double da) {
        const double sn = std::sin(da);
        if (std::fabs(sn) < 1e-9)
            throw singularity_error("two bodies coincide or sit antipodally on the equator");
        return k32 * sn / (std::fabs(sn) * sn * sn);
    };
    const double s1 = s_of(a1 - a2);
    const double s2 = s_of(a2 - a3);
    const double s3 = s_of(a3 - a1);
    const double gamma = s3;
    const MassVector mv{s2 / gamma, 1.0, s1 / gamma};
    for (int i = 0; i < 3; ++i)
        if (!(mv[i] > 0.0) || !std::isfinite(mv[i]))
            throw family_error(
                "no positive masses exist: the inscribed triangle must be acute and scalene");
    const double scale = std::max({std::fabs(s1), std::fabs(s2), std::fabs(s3)});
    const double worst = std::max({std::fabs(mv.m1 * s1 - mv.m3 * s2),
                                   std::fabs(-mv.m2 * s1 + mv.m3 * s3),
                                   std::fabs(mv.m2 * s2 - mv.m1 * s3)});
    if (worst > 1e-12 * scale)
        throw domain_error("internal: equatorial mass system residual unexpectedly large");
    return {mv, gamma};
}

ReCandidate equatorial_re_build(const Curvature& c, double a1, double a2, double a3,
                                double alpha) {
    if (alpha == 0.0) throw family_error("equatorial rotation needs a nonzero angular velocity");
    auto [masses, gamma] = equatorial_masses_from_angles(c, a1, a2, a3);
    (void)gamma;
    ReCandidate cand;
    cand.family = Family::equatorial_scalene;
    cand.kappa = c.kappa;
    cand.masses = masses;
    const double R = c.radius();
    cand.radii = {R, R, R};
    cand.phases = {a1, a2, a3};
    cand.alpha = alpha;
    check_built(c, cand);
    return cand;
}

ReCandidate planetary_re_build(const Curvature& c, double m, double r, int direction) {
    if (!(m > 0.0)) throw family_error("planetary family requires a positive central mass");
    if (!(r > 0.0)) throw family_error("planetary family requires a positive circle radius");
    const double kr2 = c.kappa * r * r;
    if (c.spherical() && !(kr2 < 1.0))
        throw family_error("planetary circle must satisfy kappa*r^2 < 1");

    const double w = std::sqrt(1.0 - kr2);
    const double theta = std::acos(w / (1.0 + w));
    const double alpha2 = m * (1.0 - kr2 + w) / (r * r * r * (1.0 - kr2) * (1.0 + w));

    ReCandidate cand;
    cand.family = Family::planetary;
    cand.kappa = c.kappa;
    cand.masses = {m, 0.0, 0.0};
    cand.radii = {0.0, r, r};
    cand.phases = {0.0, 0.0, theta};
    cand.theta = theta;
    cand.alpha = direction_sign(direction) * std::sqrt(alpha2);
    check_built(c, cand);
    return cand;
}

ReCandidate restricted_equalmass_re_build(const Curvature& c, double m, int direction) {
    if (!c.spherical())
        throw family_error(
            "the equal-primary restricted family exists only for kappa > 0; "
            "it has no hyperbolic counterpart");
    if (!(m > 0.0)) throw family_error("primary masses must be positive");

    ReCandidate cand;
    cand.family = Family::restricted_equal_mass;
    cand.kappa = c.kappa;
    cand.masses = {m, m, 0.0};
    const double r = 1.0 / std::sqrt(2.0 * c.kappa);
    cand.radii = {r, r, c.radius()};
    cand.phases = {0.0, kPi, 0.5 * kPi};
    cand.theta = 0.5 * kPi;
    cand.alpha = direction_sign(direction) * std::sqrt(2.0 * m * c.kappa * c.sqrt_abs());
    check_built(c, cand);
    return cand;
}

PlanarState instantiate(const ReCandidate& cand, double t) {
    PlanarState s;
    for (int i = 0; i < 3; ++i) {
        const double th = cand.phases[i] + cand.alpha * t;
        const double cs = std::cos(th);
        const double sn = std::sin(th);
        s.pos[i] = {cand.radii[i] * cs, cand.radii[i] * sn};
        s.vel[i] = {-cand.alpha * cand.radii[i] * sn, cand.alpha * cand.radii[i] * cs};
    }
    return s;
}

double re_residual(const Curvature& c, const MassVector& m, const ReCandidate& cand) {
    const PlanarState s = instantiate(cand, 0.0);
    const auto acc = accel_reduced(c, m, s);
    const double a2 = cand.alpha2();
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double rx = acc[i].x + a2 * s.pos[i].x;
        const double ry = acc[i].y + a2 * s.pos[i].y;
        worst = std::max(worst, std::hypot(rx, ry));
    }
    return worst;
}

double rotation_period(const ReCandidate& cand) {
    if (cand.alpha == 0.0) throw domain_error("rotation period undefined for alpha = 0");
    return 2.0 * kPi / std::fabs(cand.alpha);
}

nlohmann::json candidate_to_json(const ReCandidate& cand) {
    return nlohmann::json{
        {"family", family_name(cand.family)},
        {"kappa", cand.kappa},
        {"masses", {{"m1", cand.masses.m1}, {"m2", cand.masses.m2}, {"m3", cand.masses.m3}}},
        {"radii", {{"r1", cand.radii[0]}, {"r2", cand.radii[1]}, {"r3", cand.radii[2]}}},
        {"phases", {{"a1", cand.phases[0]}, {"a2", cand.phases[1]}, {"a3", cand.phases[2]}}},
        {"theta", cand.theta},
        {"alpha", cand.alpha},
        {"alpha2", cand.alpha2()},
    };
}

ReCandidate candidate_from_json(const nlohmann::json& j) {
    try {
        ReCandidate cand;
        cand.family = family_from_name(j.at("family").get<std::string>());
        cand.kappa = j.at("kappa").get<double>();
        const auto& m = j.at("masses");
        cand.masses = {m.at("m1").get<double>(), m.at("m2").get<double>(),
                       m.at("m3").get<double>()};
        const auto& r = j.at("radii");
        cand.radii = {r.at("r1").get<double>(), r.at("r2").get<double>(),
                      r.at("r3").get<double>()};
        const auto& a = j.at("phases");
        cand.phases = {a.at("a1").get<double>(), a.at("a2").get<double>(),
                       a.at("a3").get<double>()};
        cand.theta = j.value("theta", 0.0);
        cand.alpha = j.at("alpha").get<double>();
        cand.masses.validate();
        for (double v : cand.radii)
            if (!std::isfinite(v) || v < 0.0) throw config_error("candidate radii must be >= 0");
        if (!std::isfinite(cand.alpha)) throw config_error("candidate alpha must be finite");
        return cand;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed candidate JSON: ") + e.what());
    }
}

double equator_confinement_residual(const Curvature& c, const MassVector& m, double u, double v,
                                    const std::array<double, 3>& phases) {
    if (!c.spherical()) throw domain_error("equator confinement defined for kappa > 0");
    const double R = c.radius();
    if (!(u >= 0.0 && u <= R && v >= 0.0 && v <= R))
        throw domain_error("hemisphere heights must lie in [0, kappa^{-1/2}]");
    const double z[3] = {-R, -u, -v};
    double P[3];
    for (int i = 0; i < 3; ++i) P[i] = std::max(parallel_radius_sq(c, z[i]), 0.0);

    auto term = [&](int j, double mass) {
        const double dz = z[0] - z[j];
        const double rho2 = P[0] + P[j] - 2.0 * std::sqrt(P[0] * P[j]) *
                                              std::cos(phases[0] - phases[j]) +
                            dz * dz;
        const double w = 1.0 - 0.25 * c.kappa * rho2;
        if (!(rho2 > 0.0) || !(w > 0.0))
            throw singularity_error("collision or antipodal pair in the confinement scan");
        const double denom = rho2 * std::sqrt(rho2) * w * std::sqrt(w);
        return mass * (R + z[j]) / denom;  // R + z_j = R - height deficit
    };
    return term(1, m.m2) + term(2, m.m3);
}

double latitude_sign_obstruction(double s, double mu) {
    if (!(mu > 0.0)) throw domain_error("height parameter mu must be positive");
    return f_of_s(s) + mu * (mu + 2.0);
}

double hyperbolic_pair_radius_identity(const Curvature& c, double r) {
    if (!c.hyperbolic()) throw domain_error("identity applies to kappa < 0");
    if (!(r > 0.0)) throw domain_error("radius must be positive");
    const double kr2 = c.kappa * r * r;
    const double w1 = std::sqrt(1.0 - kr2);
    const double w2 = std::sqrt(1.0 - 2.0 * kr2);
    return kr2 / ((w1 + w2) * (w1 + w2));
}

double restricted_second_factor(const Curvature& c, double mu, double r) {
    if (c.flat()) throw domain_error("second factor defined for kappa != 0");
    if (!(mu >= 1.0) || !(r > 0.0))
        throw domain_error("requires primary ratio mu >= 1 and radius r > 0");
    const double kr2 = c.kappa * r * r;
    const double w1s = 1.0 - kr2;
    const double w2s = 1.0 - c.kappa * mu * mu * r * r;
    if (w1s < 0.0 || w2s < 0.0)
        throw domain_error("radius too large: a primary leaves the chart");
    const double d = (1.0 - mu) * r * r / (std::sqrt(w1s) + std::sqrt(w2s));
    const double sum2 = (1.0 + mu) * (1.0 + mu) * r * r;
    const double rho2 = sum2 + c.kappa * d * d;
    return 0.5 * rho2 * (1.0 + c.kappa * mu * r * r) - sum2;
}

namespace {

// Tangential + vertical system defect of a scalene phase triple on the
// parallel circle with latitude parameter gamma, masses taken from the first
// two tangential equations. Reported as evidence only; no claim either way.
double scalene_parallel_residual(double gamma, double a2, double a3) {
    const std::array<double, 3> ph{0.0, a2, a3};
    double S[3][3] = {};
    double L[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const double A = 1.0 - std::cos(ph[i] - ph[j]);
            const double B = 2.0 - gamma * A;
            if (!(A > 1e-12) || !(B > 1e-12))
                throw singularity_error("degenerate phase pair in the scalene scan");
            S[i][j] = std::sin(ph[j] - ph[i]) / std::pow(A * B, 1.5);
            L[i][j] = 1.0 / (std::sqrt(A) * B * std::sqrt(B));
        }
    const double m2 = 1.0;
    const double m3 = -m2 * S[0][1] / S[0][2];
    const double m1 = -m3 * S[1][2] / S[1][0];
    const double nm = std::max({std::fabs(m1), std::fabs(m2), std::fabs(m3)});

    const double eq3 = m1 * S[2][0] + m2 * S[2][1];
    const double eq3_scale = std::fabs(m1 * S[2][0]) + std::fabs(m2 * S[2][1]) + 1e-300;

    const double bal1 = m2 * L[0][1] + m3 * L[0][2];
    const double bal2 = m1 * L[1][0] + m3 * L[1][2];
    const double bal3 = m1 * L[2][0] + m2 * L[2][1];
    const double bal_hi = std::max({bal1, bal2, bal3});
    const double bal_lo = std::min({bal1, bal2, bal3});
    const double bal_scale = std::max({std::fabs(bal_hi), std::fabs(bal_lo), 1e-300});

    const double positivity = std::max(0.0, -std::min({m1, m2, m3}) / nm);
    return std::max({std::fabs(eq3) / eq3_scale, (bal_hi - bal_lo) / bal_scale, positivity});
}

// Evaluates fn over the parameter tuples (possibly in parallel) and fills the
// result rows in grid order; the argmin reduction is serial and in-order, so
// ties resolve to the lexicographically smallest tuple.
template <class Fn>
void parallel_eval(const std::vector<std::vector<double>>& params, ScanResult& out,
                   const Fn& fn) {
    std::vector<double> residuals(params.size());
    parallel_for(params.size(), [&](std::size_t i) { residuals[i] = fn(params[i]); });
    out.rows.reserve(params.size());
    out.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<double> row = params[i];
        row.push_back(residuals[i]);
        if (residuals[i] < out.min_residual) {
            out.min_residual = residuals[i];
            out.argmin = params[i];
        }
        out.rows.push_back(std::move(row));
    }
    if (out.rows.empty()) throw config_error("scan grid is empty after exclusions");
}

}  // namespace

ScanResult scan_nonexistence(const ScanRequest& req) {
    if (!(req.margin > 0.0))
        throw config_error("scan margin must be positive: the grid may not touch the "
                           "excluded solution set");
    if (req.n1 < 1 || req.n2 < 1) throw config_error("scan grid sizes must be positive");
    req.masses.validate();

    ScanResult out;
    std::ostringstream notes;
    std::vector<std::vector<double>> params;

    switch (req.scase) {
        case ScanCase::equator_hemisphere: {
            if (!req.c.spherical())
                throw config_error("equator_hemisphere scan requires kappa > 0");
            const double R = req.c.radius();
            if (!(req.margin < R)) throw config_error("margin exceeds the hemisphere height");
            out.param_names = {"u", "v"};
            const std::array<double, 3> phases{0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
            for (double u : linspace(0.0, R, req.n1))
                for (double v : linspace(0.0, R, req.n2)) {
                    if (R - u < req.margin && R - v < req.margin) continue;  // equatorial corner
                    params.push_back({u, v});
                }
            parallel_eval(params, out, [&](const std::vector<double>& p) {
                return equator_confinement_residual(req.c, req.masses, p[0], p[1], phases);
            });
            notes << "u,v on [0," << R << "] grid " << req.n1 << "x" << req.n2
                  << "; corner u=v=" << R << " excluded with margin " << req.margin
                  << "; phases 0, 2pi/3, 4pi/3";
            break;
        }
        case ScanCase::hyperbolic_isosceles: {
            if (!req.c.hyperbolic())
                throw config_error("hyperbolic_isosceles scan requires kappa < 0");
            out.param_names = {"s", "mu"};
            for (double s : linspace(-1.0 + req.margin, -req.margin, req.n1)) {
                if (std::fabs(s + 0.5) < req.margin) continue;  // equilateral shapes excluded
                for (double mu : linspace(req.margin, 3.0, req.n2)) params.push_back({s, mu});
            }
            parallel_eval(params, out, [&](const std::vector<double>& p) {
                return latitude_sign_obstruction(p[0], p[1]);
            });
            notes << "s on (-1,0) avoiding -1/2 by margin " << req.margin
                  << "; mu=|kappa|^{1/2} v on [" << req.margin << ",3]";
            break;
        }
        case ScanCase::hyperbolic_restricted_equal: {
            if (!req.c.hyperbolic())
                throw config_error("hyperbolic_restricted_equal scan requires kappa < 0");
            out.param_names = {"r"};
            for (int k = 1; k <= req.n1; ++k)
                params.push_back({req.r_max * static_cast<double>(k) / req.n1});
            parallel_eval(params, out, [&](const std::vector<double>& p) {
                return std::fabs(hyperbolic_pair_radius_identity(req.c, p[0]) - 1.0);
            });
            notes << "r on (0," << req.r_max << "], " << req.n1 << " points";
            break;
        }
        case ScanCase::general_restricted: {
            if (req.c.flat()) throw config_error("general_restricted scan requires kappa != 0");
            out.param_names = {"mu", "r"};
            for (double mu : linspace(1.0 + req.margin, 5.0, req.n1)) {
                const double r_hi = req.c.spherical()
                                        ? (1.0 - req.margin) * req.c.radius() / mu
                                        : req.r_max;
                const double r_lo = 0.05 * r_hi;  // collision limit r -> 0 excluded
                for (double r : linspace(r_lo, r_hi, req.n2)) params.push_back({mu, r});
            }
            parallel_eval(params, out, [&](const std::vector<double>& p) {
                return std::fabs(restricted_second_factor(req.c, p[0], p[1]));
            });
            notes << "mu on [" << 1.0 + req.margin << ",5]; r per mu on [5% of r_max(mu), "
                  << "r_max(mu)] with r_max(mu) = "
                  << (req.c.spherical() ? "(1-margin) kappa^{-1/2}/mu" : "r_max") << ", margin "
                  << req.margin;
            break;
        }
        case ScanCase::scalene_parallel: {
            if (!req.c.spherical())
                throw config_error("scalene_parallel scan requires kappa > 0");
            out.param_names = {"gamma", "a2", "a3"};
            for (double gamma : linspace(req.margin, 1.0 - req.margin, req.n1))
                for (double a2 : linspace(req.margin, kPi - req.margin, req.n2))
                    for (double a3 : linspace(kPi + req.margin, 2.0 * kPi - req.margin, req.n2)) {
                        if (std::fabs(a3 - (2.0 * kPi - a2)) < req.margin) continue;
                        if (std::fabs(a3 - 2.0 * a2) < req.margin) continue;
                        if (std::fabs(2.0 * kPi + a2 - 2.0 * a3) < req.margin) continue;
                        params.push_back({gamma, a2, a3});
                    }
            parallel_eval(params, out, [&](const std::vector<double>& p) {
                return scalene_parallel_residual(p[0], p[1], p[2]);
            });
            notes << "gamma on [" << req.margin << "," << 1.0 - req.margin
                  << "]; phases exclude isosceles triples by margin " << req.margin
                  << "; exploratory, no existence claim";
            break;
        }
    }
    out.notes = notes.str();
    return out;
}

}  // namespace cnb
