// Command-line front end: run scenario files, certify confinement conditions,
// solve boundary-value problems, monitor saved grids, project points, and
// sweep a field parameter against the certifier.
//
// Exit codes: 0 = everything ran and matched expectations, 1 = a check failed
// or the numerics did not converge, 2 = invalid input.

#include "CLI11.hpp"

#include "confine/certifier.hpp"
#include "confine/monitors.hpp"
#include "confine/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace confine;

Vec parse_vec_arg(std::string s, const std::string& what) {
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream in(s);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof()) throw ContractError(what + ": could not parse '" + s + "' as numbers");
    require(!v.empty(), what + ": expected one or more numbers");
    Vec out(static_cast<long>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<long>(i)] = v[i];
    return out;
}

nlohmann::ordered_json vec_json(const Vec& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string substitute_param(const std::string& spec, const std::string& param, double value) {
    std::vector<std::string> tok;
    {
        std::istringstream in(spec);
        std::string t;
        while (in >> t) tok.push_back(t);
    }
    size_t base = 0;
    if (!tok.empty() && tok[0] == "negated") base = 1;
    require(base < tok.size(), "empty field spec");
    const std::string kind = tok[base];
    std::map<std::string, size_t> idx;
    if (kind == "gp") {
        idx = {{"g11", 1}, {"g22", 2}, {"g12", 3}, {"mu", 4}};
    } else if (kind == "gl") {
        for (size_t i = 1; base + i < tok.size(); ++i) idx["a" + std::to_string(i)] = i;
    } else if (kind == "triple_well") {
        idx = {{"ax", 1}, {"ay", 2}, {"bx", 3}, {"by", 4}, {"cx", 5}, {"cy", 6}};
    } else {
        throw ContractError("sweep does not support field kind '" + kind + "'");
    }
    const auto it = idx.find(param);
    if (it == idx.end())
        throw ContractError("unknown sweep parameter '" + param + "' for field kind '" + kind +
                            "'");
    require(base + it->second < tok.size(),
            "field spec too short for parameter '" + param + "'");
    tok[base + it->second] = fmt17(value);
    std::string out;
    for (size_t i = 0; i < tok.size(); ++i) out += (i ? " " : "") + tok[i];
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"confinement toolkit for semilinear elliptic systems"};
    app.set_version_flag("--version", scenario::kVersion);
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "execute a scenario file and write its JSON report");
    std::string run_path, run_out;
    bool run_quiet = false;
    run->add_option("scenario", run_path, "scenario file")->required();
    run->add_option("--out", run_out, "output directory (overrides scenario and environment)");
    run->add_flag("--quiet", run_quiet, "suppress per-task progress lines");

    // --- certify -----------------------------------------------------------
    auto* certify = app.add_subcommand("certify", "check a confinement condition by sampling");
    std::string ce_mode = "convex", ce_field, ce_body, ce_variant = "rotated_lemma";
    std::string ce_e, ce_box_lo, ce_box_hi;
    double ce_shell_outer = 2.0, ce_shell_inner = -1.0, ce_level = 0.0;
    int ce_samples = 10000;
    unsigned ce_seed = 0;
    certify->add_option("--mode", ce_mode, "convex | halfspace | triangle | symmetry")
        ->check(CLI::IsMember({"convex", "halfspace", "triangle", "symmetry"}));
    certify->add_option("--field", ce_field, "field spec, e.g. 'gl 2 1'")->required();
    certify->add_option("--body", ce_body, "body spec, e.g. 'ellipse 2 1'");
    certify->add_option("--shell-outer", ce_shell_outer, "outer dilation of the sampling shell");
    certify->add_option("--shell-inner", ce_shell_inner, "inner dilation of the sampling shell");
    certify->add_option("--samples", ce_samples, "number of sample points");
    certify->add_option("--seed", ce_seed, "sampling seed");
    certify->add_option("--e", ce_e, "half-space direction, e.g. '1 0'");
    certify->add_option("--level", ce_level, "half-space level L");
    certify->add_option("--box-lo", ce_box_lo, "sampling box lower corner");
    certify->add_option("--box-hi", ce_box_hi, "sampling box upper corner");
    certify->add_option("--variant", ce_variant, "symmetry check variant")
        ->check(CLI::IsMember({"as_stated", "rotated_lemma"}));

    // --- solve -------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "solve a boundary-value problem on a grid");
    std::string so_field, so_body, so_bc = "radial_unit", so_bc_left, so_bc_right, so_save;
    std::string so_value;
    int so_dim = 1, so_n = 0;
    double so_lo = 0.0, so_hi = 0.0, so_range = 20.0, so_amp = 0.5;
    bool so_has_lo = false, so_has_hi = false;
    solve->add_option("--field", so_field, "field spec")->required();
    solve->add_option("--body", so_body, "optional body used to validate boundary data");
    solve->add_option("--dim", so_dim, "1 or 2")->check(CLI::IsMember({1, 2}));
    solve->add_option("--n,--grid", so_n, "nodes per direction")->required();
    solve->add_option("--range", so_range, "half width X: domain [-X, X]");
    solve->add_option("--lo", so_lo, "domain lower bound")->each([&](const std::string&) {
        so_has_lo = true;
    });
    solve->add_option("--hi", so_hi, "domain upper bound")->each([&](const std::string&) {
        so_has_hi = true;
    });
    solve->add_option("--bc-left", so_bc_left, "1D left boundary value, e.g. '0 1'");
    solve->add_option("--bc-right", so_bc_right, "1D right boundary value");
    solve->add_option("--bc", so_bc,
                      "2D boundary generator: radial_unit | three_phase | symmetric_sine | "
                      "constant");
    solve->add_option("--amp", so_amp, "amplitude for symmetric_sine");
    solve->add_option("--value", so_value, "vector for the constant generator");
    solve->add_option("--save", so_save, "write the grid to this CSV file");

    // --- monitor -----------------------------------------------------------
    auto* monitor = app.add_subcommand("monitor", "evaluate a check on a saved grid");
    std::string mo_csv, mo_check = "confinement", mo_body, mo_e;
    double mo_tol = -1.0, mo_kappa = 1.0, mo_band = 0.0, mo_C = 1.0, mo_R = 1.0,
           mo_level = 0.0;
    monitor->add_option("--csv", mo_csv, "grid CSV produced by solve")->required();
    monitor
        ->add_option("--check", mo_check,
                     "confinement | strictness | p | component | symmetry")
        ->check(CLI::IsMember({"confinement", "strictness", "p", "component", "symmetry"}));
    monitor->add_option("--body", mo_body, "body spec");
    monitor->add_option("--tol", mo_tol, "tolerance (default depends on the check)");
    monitor->add_option("--kappa", mo_kappa, "confinement tolerance = kappa * h^2");
    monitor->add_option("--band", mo_band, "strictness boundary band (default 10 h^2)");
    monitor->add_option("--C", mo_C, "gradient-bound constant");
    monitor->add_option("--R", mo_R, "gradient-bound radius");
    monitor->add_option("--e", mo_e, "component direction");
    monitor->add_option("--level", mo_level, "component level");

    // --- project -----------------------------------------------------------
    auto* project = app.add_subcommand("project", "signed distance and closest boundary point");
    std::string pr_body, pr_point;
    project->add_option("--body", pr_body, "body spec")->required();
    project->add_option("--point", pr_point, "query point, e.g. '3 0'")->required();

    // --- sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "certify across a range of one field parameter");
    std::string sw_field, sw_body, sw_param, sw_out;
    double sw_from = 0.0, sw_to = 0.0, sw_step = 0.1, sw_shell_outer = 2.0;
    int sw_samples = 10000;
    unsigned sw_seed = 0;
    sweep->add_option("--field", sw_field, "field spec template")->required();
    sweep->add_option("--body", sw_body, "body spec")->required();
    sweep->add_option("--param", sw_param, "parameter name, e.g. g12 or a1")->required();
    sweep->add_option("--from", sw_from, "first value")->required();
    sweep->add_option("--to", sw_to, "last value")->required();
    sweep->add_option("--step", sw_step, "increment");
    sweep->add_option("--shell-outer", sw_shell_outer, "outer dilation of the sampling shell");
    sweep->add_option("--samples", sw_samples, "samples per value");
    sweep->add_option("--seed", sw_seed, "sampling seed");
    sweep->add_option("--out", sw_out, "write results to this CSV file");

    try {
        app.parse(argc, argv);

        if (*run) {
            scenario::RunOptions opts;
            opts.output_dir = run_out;
            opts.quiet = run_quiet;
            const scenario::RunResult res = scenario::run_scenario(run_path, opts);
            if (!run_quiet)
                std::cout << "report: " << res.report_path << "\n"
                          << (res.all_expected ? "all tasks matched expectations"
                                               : "some tasks did not match expectations")
                          << "\n";
            return res.all_expected ? 0 : 1;
        }

        if (*certify) {
            const auto field = scenario::parse_field_spec(ce_field);
            certifier::CertifyOptions opts;
            if (ce_shell_inner > 0.0) opts.shell_inner = ce_shell_inner;
            certifier::Certificate cert;
            if (ce_mode == "convex") {
                require(!ce_body.empty(), "certify --mode convex needs --body");
                const auto body = scenario::parse_body_spec(ce_body);
                cert = certifier::certify_convex_condition(*field, body, ce_shell_outer,
                                                           ce_samples, ce_seed, opts);
            } else if (ce_mode == "triangle") {
                require(!ce_body.empty(), "certify --mode triangle needs --body");
                const auto body = scenario::parse_body_spec(ce_body);
                cert = certifier::certify_triangle(*field, body, ce_samples, ce_seed, opts);
            } else if (ce_mode == "halfspace") {
                require(!ce_e.empty() && !ce_box_lo.empty() && !ce_box_hi.empty(),
                        "certify --mode halfspace needs --e, --level, --box-lo, --box-hi");
                cert = certifier::certify_halfspace(
                    *field, parse_vec_arg(ce_e, "--e"), ce_level,
                    parse_vec_arg(ce_box_lo, "--box-lo"), parse_vec_arg(ce_box_hi, "--box-hi"),
                    ce_samples, ce_seed, opts);
            } else { // symmetry
                require(!ce_box_lo.empty() && !ce_box_hi.empty(),
                        "certify --mode symmetry needs --box-lo and --box-hi");
                cert = certifier::certify_symmetry_condition(
                    *field,
                    ce_variant == "as_stated" ? certifier::SymmetryVariant::AsStated
                                              : certifier::SymmetryVariant::RotatedLemma,
                    parse_vec_arg(ce_box_lo, "--box-lo"), parse_vec_arg(ce_box_hi, "--box-hi"),
                    ce_samples, ce_seed, opts);
            }
            std::cout << cert.to_json().dump(2) << "\n";
            return cert.passed() ? 0 : 1;
        }

        if (*solve) {
            const auto field = scenario::parse_field_spec(so_field);
            solver::SolutionGrid sol;
            if (so_dim == 1) {
                require(!so_bc_left.empty() && !so_bc_right.empty(),
                        "solve --dim 1 needs --bc-left and --bc-right");
                const double lo = so_has_lo ? so_lo : -so_range;
                const double hi = so_has_hi ? so_hi : so_range;
                solver::BoundaryData1D bc{parse_vec_arg(so_bc_left, "--bc-left"),
                                          parse_vec_arg(so_bc_right, "--bc-right")};
                sol = solver::solve_bvp_1d(*field, lo, hi, bc, so_n);
            } else {
                const double lo = so_has_lo ? so_lo : -5.0;
                const double hi = so_has_hi ? so_hi : 5.0;
                scenario::Table params;
                params.kv["amp"] = scenario::Value{scenario::Value::Kind::Num, "", so_amp};
                if (!so_value.empty()) {
                    const Vec v = parse_vec_arg(so_value, "--value");
                    scenario::Value arr;
                    arr.kind = scenario::Value::Kind::Arr;
                    for (long i = 0; i < v.size(); ++i) {
                        scenario::Value e;
                        e.kind = scenario::Value::Kind::Num;
                        e.num = v[i];
                        arr.arr.push_back(e);
                    }
                    params.kv["value"] = arr;
                }
                const solver::BoundaryFn2D bc =
                    scenario::make_bc_2d(so_bc, *field, lo, hi, params);
                sol = solver::solve_relax_2d(*field, lo, hi, bc, so_n);
            }
            nlohmann::ordered_json out;
            out["converged"] = sol.converged;
            out["iterations"] = sol.iterations;
            out["residual_norm"] = sol.residual_norm;
            out["N"] = sol.N;
            if (!so_save.empty()) {
                solver::save_csv(sol, so_save);
                out["csv"] = so_save;
            }
            std::cout << out.dump(2) << "\n";
            return sol.converged ? 0 : 1;
        }

        if (*monitor) {
            const solver::SolutionGrid sol = solver::load_csv(mo_csv);
            monitors::MonitorReport rep;
            if (mo_check == "confinement") {
                require(!mo_body.empty(), "monitor --check confinement needs --body");
                const auto body = scenario::parse_body_spec(mo_body);
                const double tol = mo_tol >= 0.0 ? mo_tol : mo_kappa * sol.h() * sol.h();
                rep = monitors::confinement_report(sol, body, tol);
            } else if (mo_check == "strictness") {
                require(!mo_body.empty(), "monitor --check strictness needs --body");
                const auto body = scenario::parse_body_spec(mo_body);
                rep = monitors::strictness_report(sol, body, mo_band);
            } else if (mo_check == "p") {
                rep = monitors::p_function_report(sol, mo_C, mo_R,
                                                  mo_tol >= 0.0 ? mo_tol : 1e-8);
            } else if (mo_check == "component") {
                require(!mo_e.empty(), "monitor --check component needs --e");
                rep = monitors::component_bound_report(sol, parse_vec_arg(mo_e, "--e"),
                                                       mo_level,
                                                       mo_tol >= 0.0 ? mo_tol : 1e-9);
            } else {
                rep = monitors::symmetry_report(sol, mo_tol >= 0.0 ? mo_tol : 1e-8);
            }
            std::cout << rep.to_json().dump(2) << "\n";
            return rep.pass ? 0 : 1;
        }

        if (*project) {
            const auto body = scenario::parse_body_spec(pr_body);
            const Vec u = parse_vec_arg(pr_point, "--point");
            nlohmann::ordered_json out;
            out["distance"] = body.signed_distance(u);
            out["closest"] = vec_json(body.project_boundary(u));
            out["region"] = [&] {
                switch (body.classify(u, body.tolerance())) {
                    case geometry::Region::Inside: return "inside";
                    case geometry::Region::Boundary: return "boundary";
                    default: return "outside";
                }
            }();
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*sweep) {
            require(sw_step > 0.0, "sweep --step must be positive");
            require(sw_to >= sw_from, "sweep --to must not be below --from");
            const auto body = scenario::parse_body_spec(sw_body);
            std::ostringstream csv;
            csv << "param,value,status,worst_margin\n";
            const int steps = static_cast<int>(std::floor((sw_to - sw_from) / sw_step + 0.5));
            for (int i = 0; i <= steps; ++i) {
                const double value = sw_from + i * sw_step;
                const auto field =
                    scenario::parse_field_spec(substitute_param(sw_field, sw_param, value));
                const certifier::Certificate cert = certifier::certify_convex_condition(
                    *field, body, sw_shell_outer, sw_samples, sw_seed);
                csv << sw_param << "," << fmt17(value) << "," << to_string(cert.status) << ","
                    << fmt17(cert.worst_margin) << "\n";
                std::cout << sw_param << " = " << fmt17(value) << ": "
                          << to_string(cert.status) << " (worst margin "
                          << fmt17(cert.worst_margin) << ")\n";
            }
            if (!sw_out.empty()) {
                std::ofstream f(sw_out);
                if (!f) throw NumericsError("cannot write sweep CSV to '" + sw_out + "'");
                f << csv.str();
                std::cout << "wrote " << sw_out << "\n";
            }
            return 0;
        }

        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const scenario::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
