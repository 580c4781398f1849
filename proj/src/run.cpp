#include "cnb/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cnb/bifurcation.hpp"
#include "cnb/errors.hpp"
#include "cnb/integrator.hpp"
#include "cnb/util.hpp"

namespace cnb::run {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    if (!j.is_object()) throw config_error(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw config_error("unknown key '" + it.key() + "' in " + where);
    }
}

double get_number(const json& j, const char* key) {
    if (!j.contains(key)) throw config_error(std::string("missing required key '") + key + "'");
    if (!j.at(key).is_number()) throw config_error(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double get_number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw config_error(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

MassVector masses_from(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw config_error("masses must be an array of three numbers");
    MassVector m{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
    m.validate();
    return m;
}

std::vector<double> grid_from(const json& j, const std::string& where) {
    if (j.is_array()) {
        std::vector<double> g;
        for (const auto& v : j) {
            if (!v.is_number()) throw config_error(where + " entries must be numbers");
            g.push_back(v.get<double>());
        }
        return g;
    }
    if (j.is_object()) {
        require_keys(j, {"min", "max", "n"}, where);
        const int n = j.at("n").get<int>();
        if (n < 1) throw config_error(where + ".n must be >= 1");
        return linspace(get_number(j, "min"), get_number(j, "max"), n);
    }
    throw config_error(where + " must be a list or a {min, max, n} object");
}

IntegratorOptions integrator_from(const json& cfg) {
    IntegratorOptions opts;
    if (!cfg.contains("integrator")) return opts;
    const json& j = cfg.at("integrator");
    require_keys(j, {"rel_tol", "abs_tol", "max_step", "projection", "drift_tolerance"},
                 "integrator");
    opts.rel_tol = get_number_or(j, "rel_tol", opts.rel_tol);
    opts.abs_tol = get_number_or(j, "abs_tol", opts.abs_tol);
    opts.max_step = get_number_or(j, "max_step", opts.max_step);
    opts.drift_tolerance = get_number_or(j, "drift_tolerance", opts.drift_tolerance);
    if (j.contains("projection")) {
        const std::string p = j.at("projection").get<std::string>();
        if (p == "off")
            opts.projection = Projection::off;
        else if (p == "position")
            opts.projection = Projection::position;
        else if (p == "position+velocity")
            opts.projection = Projection::position_velocity;
        else
            throw config_error("projection must be off, position, or position+velocity");
    }
    opts.validate();
    return opts;
}

void write_file(const std::string& out_dir, const std::string& name, const std::string& body) {
    fs::create_directories(out_dir);
    std::ofstream os(fs::path(out_dir) / name, std::ios::binary);
    if (!os) throw config_error("cannot write output file " + name + " under " + out_dir);
    os << body;
}

json load_candidate_spec(const json& cfg) {
    const json& c = cfg.at("candidate");
    if (c.is_string()) return load_config_file(c.get<std::string>());
    if (c.is_object()) return c;
    throw config_error("candidate must be a file path or an inline object");
}

ReCandidate build_from_config(const json& cfg) {
    require_keys(cfg,
                 {"family", "kappa", "M", "m", "r", "lambda", "v", "alpha", "angles",
                  "hemisphere", "branch", "direction"},
                 "build-re config");
    const Family family = family_from_name(cfg.at("family").get<std::string>());
    const Curvature c{get_number(cfg, "kappa")};
    const int direction = static_cast<int>(get_number_or(cfg, "direction", 1.0));
    switch (family) {
        case Family::isosceles_band: {
            Hemisphere hemi = Hemisphere::north;
            if (cfg.contains("hemisphere")) {
                const std::string h = cfg.at("hemisphere").get<std::string>();
                if (h == "north")
                    hemi = Hemisphere::north;
                else if (h == "south")
                    hemi = Hemisphere::south;
                else
                    throw config_error("hemisphere must be north or south");
            }
            Branch branch = Branch::inner;
            if (cfg.contains("branch")) {
                const std::string b = cfg.at("branch").get<std::string>();
                if (b == "inner")
                    branch = Branch::inner;
                else if (b == "outer")
                    branch = Branch::outer;
                else
                    throw config_error("branch must be inner or outer");
            }
            return isosceles_re_build(c, get_number(cfg, "M"), get_number(cfg, "m"), hemi,
                                      branch, direction);
        }
        case Family::lagrange_equal_mass: {
            const double p = c.spherical() ? get_number(cfg, "lambda") : get_number(cfg, "v");
            return lagrange_equal_mass_build(c, get_number_or(cfg, "m", 1.0), p, direction);
        }
        case Family::equatorial_scalene: {
            const json& a = cfg.at("angles");
            if (!a.is_array() || a.size() != 3)
                throw config_error("angles must be an array of three numbers");
            return equatorial_re_build(c, a.at(0).get<double>(), a.at(1).get<double>(),
                                       a.at(2).get<double>(), get_number_or(cfg, "alpha", 1.0));
        }
        case Family::planetary:
            return planetary_re_build(c, get_number_or(cfg, "m", 1.0), get_number(cfg, "r"),
                                      direction);
        case Family::restricted_equal_mass:
            return restricted_equalmass_re_build(c, get_number_or(cfg, "m", 1.0), direction);
        default:
            throw family_error("family has no constructor; it exists only as a scan case");
    }
}

}  // namespace

json load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw config_error(std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

std::string config_hash(const json& cfg) { return hex64(fnv1a64(cfg.dump())); }

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const error*>(&e)) {
        switch (err->kind()) {
            case errc::config:
            case errc::domain: return kExitConfig;
            case errc::singularity:
            case errc::chart: return kExitSingularity;
            case errc::drift: return kExitDrift;
            case errc::family: return kExitFamily;
        }
    }
    return kExitConfig;
}

int cmd_simulate(const json& cfg, const std::string& out_dir, std::ostream& out) {
    require_keys(cfg,
                 {"kappa", "masses", "formulation", "initial", "candidate", "periods", "t_span",
                  "samples", "integrator"},
                 "simulate config");
    const IntegratorOptions opts = integrator_from(cfg);

    Curvature c{0.0};
    MassVector masses;
    PlanarState s0;
    double t0 = 0.0, t1 = 0.0;

    if (cfg.contains("candidate")) {
        const ReCandidate cand = candidate_from_json(load_candidate_spec(cfg));
        c = Curvature{cand.kappa};
        masses = cand.masses;
        if (cfg.contains("kappa") && get_number(cfg, "kappa") != cand.kappa)
            throw config_error("kappa conflicts with the candidate's curvature");
        s0 = instantiate(cand);
        if (cfg.contains("t_span")) {
            t0 = cfg.at("t_span").at(0).get<double>();
            t1 = cfg.at("t_span").at(1).get<double>();
        } else {
            const double periods = get_number_or(cfg, "periods", 1.0);
            t1 = periods * rotation_period(cand);
        }
    } else {
        c = Curvature{get_number(cfg, "kappa")};
        if (!cfg.contains("masses")) throw config_error("simulate needs masses");
        masses = masses_from(cfg.at("masses"));
        if (!cfg.contains("initial")) throw config_error("simulate needs an initial state");
        const json& init = cfg.at("initial");
        require_keys(init, {"positions", "velocities"}, "initial");
        const json& ps = init.at("positions");
        const json& vs = init.at("velocities");
        if (!ps.is_array() || ps.size() != 3 || !vs.is_array() || vs.size() != 3)
            throw config_error("initial positions/velocities must be three [x, y] pairs");
        for (int i = 0; i < 3; ++i) {
            s0.pos[i] = {ps.at(i).at(0).get<double>(), ps.at(i).at(1).get<double>()};
            s0.vel[i] = {vs.at(i).at(0).get<double>(), vs.at(i).at(1).get<double>()};
        }
        if (!cfg.contains("t_span")) throw config_error("simulate needs t_span");
        t0 = cfg.at("t_span").at(0).get<double>();
        t1 = cfg.at("t_span").at(1).get<double>();
    }

    std::string formulation = "reduced";
    if (cfg.contains("formulation")) formulation = cfg.at("formulation").get<std::string>();

    Trajectory traj;
    if (formulation == "reduced") {
        traj = integrate(c, masses, s0, {t0, t1}, opts);
    } else if (formulation == "extrinsic") {
        traj = integrate_extrinsic(c, masses, lift_state(c, s0), {t0, t1}, opts);
    } else {
        throw config_error("formulation must be reduced or extrinsic");
    }

    const DriftReport drift = drift_report(traj);
    const double rho_drift = max_rho_drift(traj);
    const std::string hash = config_hash(cfg);

    const std::size_t samples = cfg.contains("samples")
                                    ? cfg.at("samples").get<std::size_t>()
                                    : 0;
    std::ostringstream csv;
    write_trajectory_csv(csv, samples > 0 ? thin(traj, samples) : traj, hash);
    write_file(out_dir, "trajectory.csv", csv.str());

    const bool ok = drift.energy <= opts.drift_tolerance && drift.c3 <= opts.drift_tolerance &&
                    drift.constraint <= opts.drift_tolerance;
    json summary{
        {"config_hash", hash},
        {"config", cfg},
        {"h_drift", drift.energy},
        {"c3_drift", drift.c3},
        {"max_constraint_residual", drift.constraint},
        {"rho_drift", rho_drift},
        {"samples", traj.size()},
        {"exit", ok ? kExitOk : kExitDrift},
    };
    write_file(out_dir, "summary.json", summary.dump(2) + "\n");
    out << "h_drift=" << format_double(drift.energy) << " c3_drift=" << format_double(drift.c3)
        << " max_constraint_residual=" << format_double(drift.constraint)
        << " rho_drift=" << format_double(rho_drift) << "\n";
    return ok ? kExitOk : kExitDrift;
}

int cmd_build_re(const json& cfg, const std::string& out_dir, std::ostream& out) {
    const ReCandidate cand = build_from_config(cfg);
    const double residual = re_residual(Curvature{cand.kappa}, cand.masses, cand);
    json doc = candidate_to_json(cand);
    doc["residual"] = residual;
    doc["config_hash"] = config_hash(cfg);
    if (cand.family == Family::isosceles_band) {
        Hemisphere hemi = Hemisphere::north;
        if (cfg.contains("hemisphere") && cfg.at("hemisphere").get<std::string>() == "south")
            hemi = Hemisphere::south;
        const IsoscelesSolution sol =
            isosceles_solution(cand.masses.m1, cand.masses.m2, hemi);
        doc["isosceles"] = {{"s", sol.s},
                            {"a", sol.a},
                            {"gamma", sol.gamma},
                            {"lambda", sol.lambda},
                            {"mass_ratio", sol.mass_ratio}};
    }
    write_file(out_dir, "candidate.json", doc.dump(2) + "\n");
    out << "family=" << family_name(cand.family) << " alpha2=" << format_double(cand.alpha2())
        << " residual=" << format_double(residual) << "\n";
    return residual <= 1e-10 ? kExitOk : kExitVerifyFailed;
}

int cmd_verify_re(const json& cfg, const std::string& out_dir, std::ostream& out) {
    require_keys(cfg, {"candidate", "periods", "tol", "rho_tol", "integrator"},
                 "verify-re config");
    if (!cfg.contains("candidate")) throw config_error("verify-re needs a candidate");
    const ReCandidate cand = candidate_from_json(load_candidate_spec(cfg));
    const double tol = get_number_or(cfg, "tol", 1e-10);
    const double rho_tol = get_number_or(cfg, "rho_tol", 1e-6);
    const double periods = get_number_or(cfg, "periods", 0.0);

    const Curvature c{cand.kappa};
    const double residual = re_residual(c, cand.masses, cand);
    out << "residual=" << format_double(residual) << "\n";

    double rho_drift = 0.0;
    if (periods > 0.0) {
        IntegratorOptions opts = integrator_from(cfg);
        if (!c.flat()) opts.projection = Projection::position_velocity;
        const double T = periods * rotation_period(cand);
        const Trajectory traj =
            integrate_extrinsic(c, cand.masses, lift_state(c, instantiate(cand)), {0.0, T}, opts);
        rho_drift = max_rho_drift(traj);
        out << "rho_drift=" << format_double(rho_drift) << " over " << format_double(periods)
            << " periods\n";
    }

    const bool ok = residual <= tol && (periods <= 0.0 || rho_drift <= rho_tol);
    json summary{{"config_hash", config_hash(cfg)}, {"residual", residual},
                 {"rho_drift", rho_drift},         {"periods", periods},
                 {"tol", tol},                     {"rho_tol", rho_tol},
                 {"pass", ok}};
    write_file(out_dir, "verify.json", summary.dump(2) + "\n");
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const json& cfg, const std::string& out_dir, std::ostream& out) {
    require_keys(cfg, {"family", "kappa_grid", "mass_ratio_grid", "lambda_grid", "outputs", "m", "r"},
                 "sweep config");
    SweepSpec spec;
    spec.family = family_from_name(cfg.at("family").get<std::string>());
    spec.kappa_grid = grid_from(cfg.at("kappa_grid"), "kappa_grid");
    if (cfg.contains("mass_ratio_grid"))
        spec.mass_ratio_grid = grid_from(cfg.at("mass_ratio_grid"), "mass_ratio_grid");
    if (cfg.contains("lambda_grid"))
        spec.lambda_grid = grid_from(cfg.at("lambda_grid"), "lambda_grid");
    if (cfg.contains("outputs")) {
        spec.outputs.clear();
        for (const auto& o : cfg.at("outputs")) spec.outputs.insert(o.get<std::string>());
    }
    spec.m = get_number_or(cfg, "m", spec.m);
    spec.r = get_number_or(cfg, "r", spec.r);

    const Table table = sweep(spec);
    const std::string hash = config_hash(cfg);
    std::ostringstream csv;
    write_table_csv(csv, table, hash);
    write_file(out_dir, "sweep.csv", csv.str());
    json manifest{{"config_hash", hash},
                  {"config", cfg},
                  {"version", kVersion},
                  {"tolerances", {{"build_residual", 1e-10}}},
                  {"rows", table.rows.size()}};
    write_file(out_dir, "sweep_manifest.json", manifest.dump(2) + "\n");
    out << "rows=" << table.rows.size() << "\n";
    return kExitOk;
}

int cmd_scan(const json& cfg, const std::string& out_dir, std::ostream& out) {
    require_keys(cfg, {"case", "kappa", "masses", "n1", "n2", "margin", "r_max"}, "scan config");
    ScanRequest req;
    if (!cfg.contains("case")) throw config_error("scan needs a case");
    req.scase = scan_case_from_name(cfg.at("case").get<std::string>());
    req.c = Curvature{get_number(cfg, "kappa")};
    if (cfg.contains("masses")) req.masses = masses_from(cfg.at("masses"));
    if (req.scase == ScanCase::scalene_parallel) {
        req.n1 = 12;  // three-parameter grid; keep the default row count moderate
        req.n2 = 24;
    }
    req.n1 = static_cast<int>(get_number_or(cfg, "n1", req.n1));
    req.n2 = static_cast<int>(get_number_or(cfg, "n2", req.n2));
    req.margin = get_number_or(cfg, "margin", req.margin);
    req.r_max = get_number_or(cfg, "r_max", req.r_max);

    const ScanResult result = scan_nonexistence(req);
    const std::string hash = config_hash(cfg);

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    for (const auto& name : result.param_names) csv << name << ",";
    csv << "residual\n";
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << format_double(row[i]);
        csv << "\n";
    }
    write_file(out_dir, "scan.csv", csv.str());

    json argmin = json::array();
    for (double v : result.argmin) argmin.push_back(v);
    json manifest{{"config_hash", hash}, {"config", cfg},
                  {"version", kVersion}, {"case", scan_case_name(req.scase)},
                  {"grid", result.notes}, {"min_residual", result.min_residual},
                  {"argmin", argmin},    {"rows", result.rows.size()}};
    write_file(out_dir, "scan_manifest.json", manifest.dump(2) + "\n");
    out << "min_residual=" << format_double(result.min_residual) << " at (";
    for (std::size_t i = 0; i < result.argmin.size(); ++i)
        out << (i ? ", " : "") << format_double(result.argmin[i]);
    out << ")\n";
    return kExitOk;
}

int cmd_f_profile(const json& cfg, const std::string& out_dir, std::ostream& out) {
    require_keys(cfg, {"s_min", "s_max", "n"}, "f-profile config");
    std::vector<double> grid;
    if (cfg.contains("n") || cfg.contains("s_min") || cfg.contains("s_max")) {
        const double lo = get_number_or(cfg, "s_min", -0.995);
        const double hi = get_number_or(cfg, "s_max", -0.005);
        const int n = static_cast<int>(get_number_or(cfg, "n", 199.0));
        grid = linspace(lo, hi, n);
    } else {
        grid = default_f_grid();
    }
    const Table table = f_profile(grid);
    std::ostringstream csv;
    write_table_csv(csv, table, config_hash(cfg));
    write_file(out_dir, "f_profile.csv", csv.str());
    out << "rows=" << table.rows.size() << "\n";
    return kExitOk;
}

int dispatch(const std::string& command, const json& cfg, const std::string& out_dir,
             std::ostream& out, std::ostream& err) {
    try {
        if (command == "simulate") return cmd_simulate(cfg, out_dir, out);
        if (command == "build-re") return cmd_build_re(cfg, out_dir, out);
        if (command == "verify-re") return cmd_verify_re(cfg, out_dir, out);
        if (command == "sweep") return cmd_sweep(cfg, out_dir, out);
        if (command == "scan") return cmd_scan(cfg, out_dir, out);
        if (command == "f-profile") return cmd_f_profile(cfg, out_dir, out);
        err << "unknown command: " << command << "\n";
        return kExitConfig;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace cnb::run
