// Command-line front end: flow runs from manifests, radial-ODE utilities,
// and the theorem verification suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "capflow/capflow.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw capflow::IoError("cannot open manifest: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw capflow::IoError("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

void print_warnings(const std::vector<capflow::ConditionWarning>& warnings) {
    const std::size_t shown = std::min<std::size_t>(warnings.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "warning: min(H - u_nu^2) = %.6g at t = %.6g\n",
                      warnings[i].min_condition, warnings[i].t);
        std::cout << buf;
    }
    if (warnings.size() > shown)
        std::cout << "warning: " << warnings.size() - shown << " further condition dips omitted\n";
}

int cmd_run(const std::string& manifest_path, bool force, const std::string& dump_field) {
    const capflow::RunManifest m = capflow::parse_manifest(read_file(manifest_path));
    const capflow::PolarCurve initial = m.curve.build(m.config.n_theta);
    const capflow::RunResult result = capflow::run_flow(initial, m.config, force);

    const fs::path dir = prepare_output_dir(m.output_dir);
    const std::string series = (dir / (m.label + "_series.csv")).string();
    const std::string snapshot = (dir / (m.label + "_final.csv")).string();
    const std::string picture = (dir / (m.label + "_final.svg")).string();
    capflow::emit_time_series(result.samples, series);
    const capflow::FlowState& last = result.samples.back();
    capflow::emit_snapshot(last, snapshot);
    capflow::emit_snapshot_svg(last, picture);
    std::cout << "wrote " << series << "\n";
    std::cout << "wrote " << snapshot << "\n";
    std::cout << "wrote " << picture << "\n";
    print_warnings(result.warnings);

    if (!result.completed) {
        std::cerr << "error: run failed at t = " << result.failure_time << ": "
                  << result.failure_message << "\n";
        return 3;
    }
    if (!dump_field.empty()) {
        const capflow::PotentialField field =
            capflow::solve_potential(last.curve, m.config.m_s, m.config.solver_tol);
        std::ofstream os(dump_field);
        if (!os.is_open()) throw capflow::IoError("cannot open field dump: " + dump_field);
        capflow::dump_field_csv(field, os);
        std::cout << "wrote " << dump_field << "\n";
    }
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "completed t=%.12g min_rho=%.12g max_rho=%.12g min_condition=%.12g "
                  "dist_to_Ropt=%.12g\n",
                  last.t, last.diagnostics.min_rho, last.diagnostics.max_rho,
                  last.diagnostics.min_condition,
                  last.diagnostics.min_rho - capflow::compute_r_opt());
    std::cout << buf;
    return 0;
}

int cmd_radial(double R0, double t_end, double dt) {
    const auto states = capflow::integrate_radial(R0, t_end, dt);
    std::cout << "t,R\n";
    char buf[80];
    for (const auto& s : states) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", s.t, s.R);
        std::cout << buf;
    }
    return 0;
}

int cmd_ropt(double tol) {
    const double r = capflow::compute_r_opt(tol);
    char buf[96];
    std::snprintf(buf, sizeof buf, "R_opt = %.17g\nresidual R log^2 R - 1 = %.3g\n", r,
                  r * std::log(r) * std::log(r) - 1.0);
    std::cout << buf;
    return 0;
}

int cmd_verify(const std::string& manifest_path) {
    const capflow::RunManifest m = capflow::parse_manifest(read_file(manifest_path));
    const capflow::PolarCurve initial = m.curve.build(m.config.n_theta);
    const auto reports = capflow::run_verification_suite(initial, m.config);

    const fs::path dir = prepare_output_dir(m.output_dir);
    const std::string txt = (dir / (m.label + "_report.txt")).string();
    const std::string csv = (dir / (m.label + "_report.csv")).string();
    {
        std::ofstream os(txt);
        if (!os.is_open()) throw capflow::IoError("cannot open report: " + txt);
        capflow::write_report_text(reports, os);
    }
    {
        std::ofstream os(csv);
        if (!os.is_open()) throw capflow::IoError("cannot open report: " + csv);
        capflow::write_report_csv(reports, os);
    }
    capflow::write_report_text(reports, std::cout);
    std::cout << "wrote " << txt << "\n";
    std::cout << "wrote " << csv << "\n";
    if (!capflow::all_passed(reports)) {
        std::cerr << "verification failed\n";
        return 4;
    }
    std::cout << "all theorems verified\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar curvature flow with capacity forcing: simulator and verifier"};
    app.require_subcommand(1);

    std::string run_manifest;
    bool force = false;
    std::string dump_field;
    CLI::App* run_cmd = app.add_subcommand("run", "execute a flow described by a manifest");
    run_cmd->add_option("manifest", run_manifest, "manifest file path")->required();
    run_cmd->add_flag("--force", force,
                      "start even if the initial curve violates min(H - u_nu^2) > 0");
    run_cmd->add_option("--dump-field", dump_field,
                        "also write the final capacity potential to this CSV path");

    double R0 = 3.0, t_end = 5.0, dt = 1e-3;
    CLI::App* radial_cmd =
        app.add_subcommand("radial", "integrate the radial ODE and print a t,R table");
    radial_cmd->add_option("--R0", R0, "initial radius (> 1)")->required();
    radial_cmd->add_option("--t-end", t_end, "final time")->required();
    radial_cmd->add_option("--dt", dt, "time step")->required();

    double ropt_tol = 1e-12;
    CLI::App* ropt_cmd = app.add_subcommand("ropt", "print the stationary radius");
    ropt_cmd->add_option("--tol", ropt_tol, "bisection tolerance");

    std::string verify_manifest;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the theorem verification suite from a manifest");
    verify_cmd->add_option("manifest", verify_manifest, "manifest file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_manifest, force, dump_field);
        if (radial_cmd->parsed()) return cmd_radial(R0, t_end, dt);
        if (ropt_cmd->parsed()) return cmd_ropt(ropt_tol);
        if (verify_cmd->parsed()) return cmd_verify(verify_manifest);
    } catch (const capflow::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const capflow::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const capflow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
