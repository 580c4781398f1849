// Command-line front end: simulate | build-re | verify-re | sweep | scan | f-profile.
// Flags override config-file values; every run writes its outputs (with the
// effective-config hash embedded) under --out.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cnb/run.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--out", args.out_dir, "output directory (default: .)");
}

json base_config(const CommonArgs& args) {
    if (args.config_path.empty()) return json::object();
    return cnb::run::load_config_file(args.config_path);
}

void set_if(json& cfg, const char* key, const std::optional<double>& v) {
    if (v) cfg[key] = *v;
}

void set_if(json& cfg, const char* key, const std::string& v) {
    if (!v.empty()) cfg[key] = v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3-body dynamics and relative equilibria on constant-curvature surfaces"};
    app.require_subcommand(1);

    // simulate
    CommonArgs sim_args;
    std::optional<double> sim_kappa, sim_tol;
    auto* sim = app.add_subcommand("simulate", "integrate a trajectory and log drift");
    add_common(sim, sim_args);
    sim->add_option("--kappa", sim_kappa, "curvature override");
    sim->add_option("--tol", sim_tol, "drift tolerance override");

    // build-re
    CommonArgs build_args;
    std::string family, hemisphere, branch;
    std::optional<double> b_kappa, b_M, b_m, b_r, b_lambda, b_v, b_alpha, b_direction;
    std::vector<double> b_angles;
    auto* build = app.add_subcommand("build-re", "construct a relative-equilibrium candidate");
    add_common(build, build_args);
    build->add_option("--family", family, "family name");
    build->add_option("--kappa", b_kappa, "curvature");
    build->add_option("--M", b_M, "distinguished mass");
    build->add_option("--m", b_m, "reference mass");
    build->add_option("--r", b_r, "circle radius (planetary)");
    build->add_option("--lambda", b_lambda, "parallel-circle parameter (kappa > 0)");
    build->add_option("--v", b_v, "circle height (kappa < 0)");
    build->add_option("--alpha", b_alpha, "angular velocity (equatorial family)");
    build->add_option("--angles", b_angles, "three equatorial phases")->expected(3);
    build->add_option("--hemisphere", hemisphere, "north|south");
    build->add_option("--branch", branch, "inner|outer");
    build->add_option("--direction", b_direction, "rotation sense, +1 or -1");

    // verify-re
    CommonArgs verify_args;
    std::string candidate_path;
    std::optional<double> v_periods, v_tol, v_rho_tol;
    auto* verify = app.add_subcommand("verify-re", "verify a candidate file");
    add_common(verify, verify_args);
    verify->add_option("--candidate", candidate_path, "candidate JSON file");
    verify->add_option("--periods", v_periods, "integrate this many rotation periods");
    verify->add_option("--tol", v_tol, "residual threshold (default 1e-10)");
    verify->add_option("--rho-tol", v_rho_tol, "mutual-distance drift threshold (default 1e-6)");

    // sweep
    CommonArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep to CSV");
    add_common(sweep_cmd, sweep_args);

    // scan
    CommonArgs scan_args;
    std::string scan_case;
    std::optional<double> s_kappa, s_margin, s_rmax, s_n1, s_n2;
    auto* scan = app.add_subcommand("scan", "nonexistence residual scan to CSV");
    add_common(scan, scan_args);
    scan->add_option("--case", scan_case, "scan case name");
    scan->add_option("--kappa", s_kappa, "curvature");
    scan->add_option("--margin", s_margin, "margin kept from excluded sets");
    scan->add_option("--r-max", s_rmax, "radial extent");
    scan->add_option("--n1", s_n1, "first grid size");
    scan->add_option("--n2", s_n2, "second grid size");

    // f-profile
    CommonArgs prof_args;
    std::optional<double> p_n, p_smin, p_smax;
    auto* prof = app.add_subcommand("f-profile", "tabulate the shape curve F(s)");
    add_common(prof, prof_args);
    prof->add_option("--n", p_n, "number of grid points");
    prof->add_option("--s-min", p_smin, "left end of the s grid");
    prof->add_option("--s-max", p_smax, "right end of the s grid");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            json cfg = base_config(sim_args);
            set_if(cfg, "kappa", sim_kappa);
            if (sim_tol) cfg["integrator"]["drift_tolerance"] = *sim_tol;
            return cnb::run::dispatch("simulate", cfg, sim_args.out_dir, std::cout, std::cerr);
        }
        if (build->parsed()) {
            json cfg = base_config(build_args);
            set_if(cfg, "family", family);
            set_if(cfg, "kappa", b_kappa);
            set_if(cfg, "M", b_M);
            set_if(cfg, "m", b_m);
            set_if(cfg, "r", b_r);
            set_if(cfg, "lambda", b_lambda);
            set_if(cfg, "v", b_v);
            set_if(cfg, "alpha", b_alpha);
            set_if(cfg, "direction", b_direction);
            set_if(cfg, "hemisphere", hemisphere);
            set_if(cfg, "branch", branch);
            if (!b_angles.empty()) cfg["angles"] = b_angles;
            return cnb::run::dispatch("build-re", cfg, build_args.out_dir, std::cout, std::cerr);
        }
        if (verify->parsed()) {
            json cfg = base_config(verify_args);
            set_if(cfg, "candidate", candidate_path);
            set_if(cfg, "periods", v_periods);
            set_if(cfg, "tol", v_tol);
            set_if(cfg, "rho_tol", v_rho_tol);
            return cnb::run::dispatch("verify-re", cfg, verify_args.out_dir, std::cout,
                                      std::cerr);
        }
        if (sweep_cmd->parsed()) {
            return cnb::run::dispatch("sweep", base_config(sweep_args), sweep_args.out_dir,
                                      std::cout, std::cerr);
        }
        if (scan->parsed()) {
            json cfg = base_config(scan_args);
            set_if(cfg, "case", scan_case);
            set_if(cfg, "kappa", s_kappa);
            set_if(cfg, "margin", s_margin);
            set_if(cfg, "r_max", s_rmax);
            set_if(cfg, "n1", s_n1);
            set_if(cfg, "n2", s_n2);
            return cnb::run::dispatch("scan", cfg, scan_args.out_dir, std::cout, std::cerr);
        }
        if (prof->parsed()) {
            json cfg = base_config(prof_args);
            set_if(cfg, "n", p_n);
            set_if(cfg, "s_min", p_smin);
            set_if(cfg, "s_max", p_smax);
            return cnb::run::dispatch("f-profile", cfg, prof_args.out_dir, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cnb::run::exit_code_for(e);
    }
    return cnb::run::kExitConfig;
}
