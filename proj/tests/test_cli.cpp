#include "doctest.h"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

// Runs the installed binary through the shell and captures stdout+stderr.
CmdResult run_cmd(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + std::string(CONFINE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    CmdResult res;
    if (!pipe) return res;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), pipe)) res.out.append(buf, n);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) res.code = WEXITSTATUS(status);
    return res;
}

std::string scenario_path(const std::string& name) {
    return std::string(CONFINE_SCENARIO_DIR) + "/" + name;
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("confine_cli_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cli: version and usage errors") {
    CHECK(run_cmd("--version").code == 0);
    CHECK(run_cmd("--version").out.find("0.1.0") != std::string::npos);
    CHECK(run_cmd("").code == 2);          // a subcommand is required
    CHECK(run_cmd("frobnicate").code == 2); // unknown subcommand
    CHECK(run_cmd("certify").code == 2);    // missing required --field
}

TEST_CASE("cli: project prints distance, closest point, and region") {
    const CmdResult res = run_cmd("project --body \"ball 1\" --point \"2,0\"");
    REQUIRE(res.code == 0);
    const auto j = nlohmann::json::parse(res.out);
    CHECK(j["distance"] == doctest::Approx(1.0));
    CHECK(j["closest"][0] == doctest::Approx(1.0));
    CHECK(j["closest"][1] == doctest::Approx(0.0));
    CHECK(j["region"] == "outside");

    CHECK(run_cmd("project --body \"ball 1\" --point \"x\"").code == 2);
    CHECK(run_cmd("project --body \"blob 1\" --point \"2,0\"").code == 2);
}

TEST_CASE("cli: certify modes and their exit codes") {
    const CmdResult pass =
        run_cmd("certify --mode convex --field \"gl 1 1\" --body \"ball 1\" "
                "--samples 2000 --seed 7");
    REQUIRE(pass.code == 0);
    const auto jp = nlohmann::json::parse(pass.out);
    CHECK(jp["status"] == "pass");
    CHECK(jp["worst_margin"].get<double>() > 0.0);

    const CmdResult fail =
        run_cmd("certify --mode convex --field \"negated gl 1 1\" --body \"ball 1\" "
                "--samples 2000 --seed 7");
    CHECK(fail.code == 1);
    CHECK(nlohmann::json::parse(fail.out)["status"] == "fail");

    CHECK(run_cmd("certify --mode convex --field \"gl 1 1\" --body \"ball 1\" --samples 0")
              .code == 2);
    CHECK(run_cmd("certify --mode convex --field \"gl 1 1\"").code == 2); // needs --body

    const CmdResult half =
        run_cmd("certify --mode halfspace --field \"gl 1 1\" --e \"1,0\" --level 1.2 "
                "--box-lo=\"-2,-2\" --box-hi=\"2,2\" --samples 2000");
    CHECK(half.code == 0);
    CHECK(nlohmann::json::parse(half.out)["status"] == "pass");

    const CmdResult sym_ok =
        run_cmd("certify --mode symmetry --field \"symmetry_demo\" --variant rotated_lemma "
                "--box-lo=\"-3,-3\" --box-hi=\"3,3\" --samples 3000 --seed 5");
    CHECK(sym_ok.code == 0);
    const CmdResult sym_bad =
        run_cmd("certify --mode symmetry --field \"symmetry_demo\" --variant as_stated "
                "--box-lo=\"-3,-3\" --box-hi=\"3,3\" --samples 3000 --seed 5");
    CHECK(sym_bad.code == 1);
    CHECK(nlohmann::json::parse(sym_bad.out)["status"] == "fail");
}

TEST_CASE("cli: solve writes a grid that monitor accepts") {
    const auto dir = fresh_dir("solve");
    const std::string csv = (dir / "wall.csv").string();

    const CmdResult solve =
        run_cmd("solve --field \"gp 1 1 2 1\" --dim 1 --n 401 --range 20 "
                "--bc-left=\"0,1\" --bc-right=\"1,0\" --save \"" + csv + "\"");
    REQUIRE(solve.code == 0);
    const auto js = nlohmann::json::parse(solve.out);
    CHECK(js["converged"] == true);
    CHECK(js["residual_norm"].get<double>() <= 1e-10);
    REQUIRE(std::filesystem::exists(csv));

    const CmdResult conf =
        run_cmd("monitor --csv \"" + csv + "\" --check confinement --body \"ball 1\" --tol 1e-6");
    CHECK(conf.code == 0);
    CHECK(nlohmann::json::parse(conf.out)["pass"] == true);

    const CmdResult comp =
        run_cmd("monitor --csv \"" + csv + "\" --check component --e \"1,0\" --level 1");
    CHECK(comp.code == 0);

    // The wall joins two different phases, so the diagonal symmetry fails.
    const CmdResult sym = run_cmd("monitor --csv \"" + csv + "\" --check symmetry");
    CHECK(sym.code == 1);

    CHECK(run_cmd("monitor --csv \"" + csv + "\" --check confinement").code == 2);
    CHECK(run_cmd("monitor --csv /nonexistent.csv --check symmetry").code == 1);
}

TEST_CASE("cli: run executes scenarios and respects --out and the environment") {
    const auto dir = fresh_dir("run");
    const CmdResult res = run_cmd("run \"" + scenario_path("gl_flipped.toml") +
                                  "\" --out \"" + dir.string() + "\" --quiet");
    CHECK(res.code == 0);
    CHECK(res.out.empty());
    CHECK(std::filesystem::exists(dir / "gl_flipped_report.json"));

    const auto env_dir = fresh_dir("run_env");
    const CmdResult env_res =
        run_cmd("run \"" + scenario_path("gl_flipped.toml") + "\" --quiet",
                "CONFINE_OUT_DIR=\"" + env_dir.string() + "\" ");
    CHECK(env_res.code == 0);
    CHECK(std::filesystem::exists(env_dir / "gl_flipped_report.json"));

    CHECK(run_cmd("run /nonexistent/confine.toml").code == 1);

    const auto bad = fresh_dir("run_bad") / "bad.toml";
    {
        std::ofstream out(bad);
        out << "name = \"bad\"\nbroken line\n";
    }
    CHECK(run_cmd("run \"" + bad.string() + "\"").code == 2);
}

TEST_CASE("cli: sweep records the transition of the certifier verdict") {
    const auto dir = fresh_dir("sweep");
    const std::string csv = (dir / "sweep.csv").string();
    const CmdResult res =
        run_cmd("sweep --field \"gp 1 1 2 1\" --body \"ball 1\" --param g12 "
                "--from 0.9 --to 1.1 --step 0.05 --samples 3000 --seed 11 "
                "--out \"" + csv + "\"");
    REQUIRE(res.code == 0);
    REQUIRE(std::filesystem::exists(csv));

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "param,value,status,worst_margin");
    std::string line, first_status, last_status;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
        const size_t c3 = line.find(',', c2 + 1);
        const std::string status = line.substr(c2 + 1, c3 - c2 - 1);
        if (first_status.empty()) first_status = status;
        last_status = status;
    }
    CHECK(first_status == "fail"); // weak coupling spills outside the ball
    CHECK(last_status == "pass");  // strong segregation confines

    CHECK(run_cmd("sweep --field \"gp 1 1 2 1\" --body \"ball 1\" --param bogus "
                  "--from 0.9 --to 1.1")
              .code == 2);
    CHECK(run_cmd("sweep --field \"symmetry_demo\" --body \"ball 1\" --param a1 "
                  "--from 0.9 --to 1.1")
              .code == 2);
}
