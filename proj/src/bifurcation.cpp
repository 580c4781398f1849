#include "cnb/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cnb/errors.hpp"
#include "cnb/util.hpp"

namespace cnb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RowBuilder {
    const std::set<std::string>& outputs;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<double> current;

    explicit RowBuilder(const std::set<std::string>& out) : outputs(out) {}

    bool wants(const char* key) const { return outputs.count(key) > 0; }
    void define(const std::string& name) { columns.push_back(name); }
    void push(double v) { current.push_back(v); }
    void finish() {
        rows.push_back(current);
        current.clear();
    }
};

// Scan residual attached to a nonexistent restricted_equal_mass point.
double restricted_scan_residual(const Curvature& c, int n) {
    if (!c.hyperbolic()) return kNaN;
    double min_res = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
        const double r = 5.0 * static_cast<double>(k) / n;
        min_res = std::min(min_res,
                           std::fabs(hyperbolic_pair_radius_identity(c, r) - 1.0));
    }
    return min_res;
}

}  // namespace

void SweepSpec::validate() const {
    auto check_grid = [](const std::vector<double>& g, const char* name) {
        if (g.empty()) throw config_error(std::string("sweep grid is empty: ") + name);
        for (double v : g)
            if (!std::isfinite(v))
                throw config_error(std::string("sweep grid has a non-finite value: ") + name);
    };
    check_grid(kappa_grid, "kappa_grid");
    check_grid(mass_ratio_grid, "mass_ratio_grid");
    check_grid(lambda_grid, "lambda_grid");
    if (!(m > 0.0)) throw config_error("sweep reference mass must be positive");
    if (!(r > 0.0)) throw config_error("sweep circle radius must be positive");
    static const std::set<std::string> known{"existence", "alpha", "latitude", "shape_s",
                                             "residual"};
    for (const auto& o : outputs)
        if (!known.count(o)) throw config_error("unknown sweep output: " + o);
    switch (family) {
        case Family::planetary:
        case Family::restricted_equal_mass:
        case Family::isosceles_band:
        case Family::lagrange_equal_mass:
            break;
        default:
            throw config_error("family is not sweepable; use the scan command for "
                               "nonexistence cases");
    }
}

Table sweep(const SweepSpec& spec) {
    spec.validate();
    RowBuilder b(spec.outputs);

    auto emit_candidate = [&](const ReCandidate* cand, double scan_residual, double lambda,
                              double shape_s) {
        b.push(cand ? 1.0 : 0.0);
        if (b.wants("alpha")) {
            b.push(cand ? std::fabs(cand->alpha) : kNaN);
            b.push(cand ? cand->alpha2() : kNaN);
        }
        if (b.wants("latitude")) {
            b.push(cand ? lambda : kNaN);
            b.push(cand && std::isfinite(lambda) ? std::fabs(1.0 - lambda) : kNaN);
        }
        if (b.wants("shape_s")) b.push(cand ? shape_s : kNaN);
        if (b.wants("residual")) {
            if (cand)
                b.push(re_residual(Curvature{cand->kappa}, cand->masses, *cand));
            else
                b.push(scan_residual);
        }
        b.finish();
    };

    auto define_columns = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) b.define(k);
        b.define("exists");
        if (b.wants("alpha")) {
            b.define("alpha");
            b.define("alpha2");
        }
        if (b.wants("latitude")) {
            b.define("lambda");
            b.define("latitude");
        }
        if (b.wants("shape_s")) b.define("shape_s");
        if (b.wants("residual")) b.define("residual");
    };

    switch (spec.family) {
        case Family::planetary: {
            define_columns({"kappa"});
            for (double kappa : spec.kappa_grid) {
                b.push(kappa);
                try {
                    const ReCandidate cand =
                        planetary_re_build(Curvature{kappa}, spec.m, spec.r, +1);
                    emit_candidate(&cand, kNaN, kNaN, kNaN);
                } catch (const error&) {
                    emit_candidate(nullptr, kNaN, kNaN, kNaN);
                }
            }
            break;
        }
        case Family::restricted_equal_mass: {
            define_columns({"kappa"});
            for (double kappa : spec.kappa_grid) {
                b.push(kappa);
                try {
                    const Curvature c{kappa};
                    const ReCandidate cand = restricted_equalmass_re_build(c, spec.m, +1);
                    // primaries sit at height sqrt(1 - 1/2) above the equator plane
                    const double d = std::sqrt(std::max(1.0 - c.kappa * cand.radii[0] *
                                                                  cand.radii[0],
                                                        0.0));
                    emit_candidate(&cand, kNaN, 1.0 - d, kNaN);
                } catch (const error&) {
                    emit_candidate(nullptr, restricted_scan_residual(Curvature{kappa}, 200),
                                   kNaN, kNaN);
                }
            }
            break;
        }
        case Family::isosceles_band: {
            define_columns({"kappa", "mass_ratio"});
            for (double kappa : spec.kappa_grid)
                for (double ratio : spec.mass_ratio_grid) {
                    b.push(kappa);
                    b.push(ratio);
                    if (ratio == 1.0) {
                        // equilateral: present on every circle, with no single latitude
                        b.push(1.0);
                        if (b.wants("alpha")) { b.push(kNaN); b.push(kNaN); }
                        if (b.wants("latitude")) { b.push(kNaN); b.push(kNaN); }
                        if (b.wants("shape_s")) b.push(-0.5);
                        if (b.wants("residual")) b.push(kNaN);
                        b.finish();
                        continue;
                    }
                    try {
                        const Curvature c{kappa};
                        const ReCandidate cand = isosceles_re_build(c, ratio, 1.0,
                                                                    Hemisphere::north,
                                                                    Branch::inner, +1);
                        const IsoscelesSolution sol =
                            isosceles_solution(ratio, 1.0, Hemisphere::north);
                        emit_candidate(&cand, kNaN, sol.lambda, sol.s);
                    } catch (const error&) {
                        emit_candidate(nullptr, kNaN, kNaN, kNaN);
                    }
                }
            break;
        }
        case Family::lagrange_equal_mass: {
            define_columns({"kappa", "lambda_param"});
            for (double kappa : spec.kappa_grid)
                for (double lam : spec.lambda_grid) {
                    b.push(kappa);
                    b.push(lam);
                    try {
                        const ReCandidate cand =
                            lagrange_equal_mass_build(Curvature{kappa}, spec.m, lam, +1);
                        emit_candidate(&cand, kNaN, kappa > 0.0 ? lam : kNaN, -0.5);
                    } catch (const error&) {
                        emit_candidate(nullptr, kNaN, kNaN, kNaN);
                    }
                }
            break;
        }
        default:
            break;  // unreachable: validate() filtered
    }
    return Table{std::move(b.columns), std::move(b.rows)};
}

std::pair<double, double> band_boundaries(const Curvature& c) {
    if (!c.spherical()) throw domain_error("band boundaries defined for kappa > 0");
    const double rbar = c.radius();
    return {std::sqrt(3.0) / 3.0 * rbar, 0.6 * rbar};
}

Table f_profile(const std::vector<double>& s_grid) {
    Table t;
    t.columns = {"s", "F"};
    for (double s : s_grid) {
        if (!(s > -1.0 && s < 0.0))
            throw domain_error("profile grid must stay inside (-1, 0)");
        if (std::fabs(s + 0.5) < 1e-6)
            throw domain_error("profile grid point too close to the equilateral value -1/2");
        t.rows.push_back({s, f_of_s(s)});
    }
    return t;
}

std::vector<double> default_f_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 99; ++i) grid.push_back(-0.995 + 0.005 * i);  // up to -0.505
    for (int i = 0; i < 99; ++i) grid.push_back(-0.495 + 0.005 * i);  // down to -0.005
    return grid;
}

void write_table_csv(std::ostream& os, const Table& table, const std::string& config_hash) {
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
}

}  // namespace cnb
