#include "doctest.h"

#include "confine/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>

using namespace confine;
using namespace confine::scenario;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

std::string scenario_path(const std::string& name) {
    return std::string(CONFINE_SCENARIO_DIR) + "/" + name;
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("confine_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int thrown_line(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("scenario text parses sections, tasks, and typed values") {
    const Document doc = parse_scenario_text(
        "seed = 3\n"
        "title = \"has # inside\" # trailing comment\n"
        "flag = true\n"
        "small = 1.5e-3\n"
        "neg = -2\n"
        "arr = [1, 2, 3]\n"
        "nested = [[1, 2], [3, 4]]\n"
        "empty = []\n"
        "\n"
        "[field]\n"
        "kind = \"gl\"\n"
        "a = [2, 1]\n"
        "\n"
        "[[task]]\n"
        "kind = \"certify_convex\"\n"
        "expect = \"pass\"\n"
        "[[task]]\n"
        "kind = \"noop\"\n");

    CHECK(doc.root.num("seed") == 3.0);
    CHECK(doc.root.str("title") == "has # inside");
    CHECK(doc.root.bool_or("flag", false));
    CHECK(doc.root.num("small") == doctest::Approx(1.5e-3));
    CHECK(doc.root.num("neg") == -2.0);
    CHECK(doc.root.num_array("arr") == std::vector<double>{1, 2, 3});
    CHECK(doc.root.raw("nested").arr[1].arr[0].num == 3.0);
    CHECK(doc.root.raw("empty").arr.empty());
    CHECK(doc.root.num_or("absent", 7.5) == 7.5);
    CHECK(doc.root.str_or("absent", "x") == "x");
    CHECK(doc.root.num_array_or("absent", {9}) == std::vector<double>{9});

    REQUIRE(doc.sections.count("field") == 1);
    CHECK(doc.sections.at("field").str("kind") == "gl");
    CHECK(doc.sections.at("field").num_array("a") == std::vector<double>{2, 1});

    REQUIRE(doc.tasks.size() == 2);
    CHECK(doc.tasks[0].str("expect") == "pass");
    CHECK(doc.tasks[0].line == 14);
    CHECK(doc.tasks[0].line_of("expect") == 16);
    CHECK(doc.tasks[1].line == 17);
    CHECK(doc.tasks[1].name == "task 2");
}

TEST_CASE("parse errors carry the offending line number") {
    CHECK(thrown_line([] { (void)parse_scenario_text("a = 1\nbroken line\n"); }) == 2);
    CHECK(thrown_line([] { (void)parse_scenario_text("a = 1\na = 2\n"); }) == 2);
    CHECK(thrown_line([] { (void)parse_scenario_text("[s]\nx = 1\n[s]\n"); }) == 3);
    CHECK(thrown_line([] { (void)parse_scenario_text("a = \"oops\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("a = [1, 2\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("a = 1 2\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("b = [1; 2]\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("\n[[other]]\n"); }) == 2);
    CHECK(thrown_line([] { (void)parse_scenario_text("my key = 1\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("[unclosed\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("[]\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("a =\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("a = nope\n"); }) == 1);
    CHECK(thrown_line([] { (void)parse_scenario_text("a = trueish\n"); }) == 1);
}

TEST_CASE("typed accessors flag the key and its line on a mismatch") {
    const Document doc = parse_scenario_text("a = 1\nname = \"x\"\narr = [1, \"two\"]\n");
    CHECK(thrown_line([&] { (void)doc.root.num("name"); }) == 2);
    CHECK(thrown_line([&] { (void)doc.root.str("a"); }) == 1);
    CHECK(thrown_line([&] { (void)doc.root.num_array("arr"); }) == 3);
    CHECK(thrown_line([&] { (void)doc.root.bool_or("a", true); }) == 1);
    CHECK(thrown_line([&] { (void)doc.root.num("missing"); }) == 0);
    try {
        (void)doc.root.num("name");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("name") != std::string::npos);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("field tables build every catalog entry") {
    const Document doc = parse_scenario_text(
        "[gl]\nkind = \"gl\"\na = [1, 1]\n"
        "[gl_neg]\nkind = \"gl\"\na = [1, 1]\nnegate = true\n"
        "[gp]\nkind = \"gp\"\ng11 = 1\ng22 = 1\ng12 = 2\nmu = 1\n"
        "[tw]\nkind = \"triple_well\"\na = [0, 1]\nb = [0, -1]\nc = [-1, 0]\n"
        "[sym]\nkind = \"symmetry_demo\"\n"
        "[poly]\nkind = \"polynomial\"\nm = 1\nterms1 = [[1, 3], [-1, 1]]\n");

    const auto gl = make_field(doc.sections.at("gl"));
    CHECK(gl->dimension() == 2);
    CHECK((gl->eval(v2(2, 0)) - v2(6, 0)).norm() <= 1e-14);

    const auto gl_neg = make_field(doc.sections.at("gl_neg"));
    CHECK((gl_neg->eval(v2(2, 0)) + v2(6, 0)).norm() <= 1e-14);

    const auto gp = make_field(doc.sections.at("gp"));
    CHECK(gp->eval(v2(1, 0)).norm() <= 1e-14);

    const auto tw = make_field(doc.sections.at("tw"));
    CHECK(tw->eval(v2(0, 1)).norm() <= 1e-12);

    const auto sym = make_field(doc.sections.at("sym"));
    CHECK(sym->dimension() == 2);

    const auto poly = make_field(doc.sections.at("poly"));
    CHECK(poly->dimension() == 1);
    Vec u(1);
    u << 2.0;
    CHECK(poly->eval(u)(0) == doctest::Approx(6.0)); // 2^3 - 2

    const Document bad = parse_scenario_text(
        "[f]\nkind = \"vortex\"\n"
        "[tw]\nkind = \"triple_well\"\na = [0, 1, 2]\nb = [0, -1]\nc = [-1, 0]\n"
        "[poly]\nkind = \"polynomial\"\nm = 2\nterms1 = [[1, 3]]\nterms2 = [[1, 0, 0]]\n");
    CHECK_THROWS_AS((void)make_field(bad.sections.at("f")), ParseError);
    CHECK_THROWS_AS((void)make_field(bad.sections.at("tw")), ParseError);
    CHECK_THROWS_AS((void)make_field(bad.sections.at("poly")), ParseError);
}

TEST_CASE("body tables build every region kind") {
    const Document doc = parse_scenario_text(
        "[ball]\nkind = \"ball\"\nradius = 1.5\n"
        "[ell]\nkind = \"ellipse\"\nsemi_axes = [2, 1]\n"
        "[tri]\nkind = \"triangle\"\nvertices = [[0, 1], [-1, 0], [0, -1]]\n"
        "[half]\nkind = \"halfspace\"\nnormal = [1, 0]\nlevel = 2\n"
        "[bad]\nkind = \"torus\"\n"
        "[badv]\nkind = \"polygon\"\nvertices = [[0, 1], [1]]\n");

    CHECK(make_body(doc.sections.at("ball")).ball_radius() == 1.5);
    CHECK(make_body(doc.sections.at("ell")).signed_distance(v2(3, 0)) ==
          doctest::Approx(1.0));
    CHECK(make_body(doc.sections.at("tri")).signed_distance(v2(0, 2)) ==
          doctest::Approx(1.0));
    CHECK(make_body(doc.sections.at("half")).halfspace_level() == 2.0);
    CHECK_THROWS_AS((void)make_body(doc.sections.at("bad")), ParseError);
    CHECK_THROWS_AS((void)make_body(doc.sections.at("badv")), ParseError);
}

TEST_CASE("compact field specs parse and reject bad tokens") {
    CHECK(parse_field_spec("gl 2 1")->eval(v2(2, 0)).norm() <= 1e-14);
    CHECK((parse_field_spec("negated gl 1 1")->eval(v2(2, 0)) + v2(6, 0)).norm() <= 1e-14);
    CHECK(parse_field_spec("gp 1 1 2 1")->eval(v2(1, 0)).norm() <= 1e-14);
    CHECK(parse_field_spec("triple_well 0 1 0 -1 -1 0")->eval(v2(0, 1)).norm() <= 1e-12);
    CHECK(parse_field_spec("symmetry_demo")->dimension() == 2);

    CHECK_THROWS_AS((void)parse_field_spec(""), ContractError);
    CHECK_THROWS_AS((void)parse_field_spec("negated"), ContractError);
    CHECK_THROWS_AS((void)parse_field_spec("gl"), ContractError);
    CHECK_THROWS_AS((void)parse_field_spec("gl 2 x"), ContractError);
    CHECK_THROWS_AS((void)parse_field_spec("gp 1 1 2"), ContractError);
    CHECK_THROWS_AS((void)parse_field_spec("vortex 1"), ContractError);
    CHECK_THROWS_AS((void)parse_field_spec("symmetry_demo 3"), ContractError);
}

TEST_CASE("compact body specs parse and reject bad tokens") {
    CHECK(parse_body_spec("ball 1.5").signed_distance(v2(2.5, 0)) == doctest::Approx(1.0));
    CHECK(parse_body_spec("ball 2 3").dimension() == 3);
    CHECK(parse_body_spec("ellipse 2 1").is_strictly_convex());
    CHECK(parse_body_spec("polygon 0 1 -1 0 0 -1").signed_distance(v2(0, 2)) ==
          doctest::Approx(1.0));
    CHECK(parse_body_spec("halfspace 1 0 2").signed_distance(v2(3, 0)) == doctest::Approx(1.0));

    CHECK_THROWS_AS((void)parse_body_spec(""), ContractError);
    CHECK_THROWS_AS((void)parse_body_spec("ball"), ContractError);
    CHECK_THROWS_AS((void)parse_body_spec("ball x"), ContractError);
    CHECK_THROWS_AS((void)parse_body_spec("polygon 0 1 -1 0"), ContractError);
    CHECK_THROWS_AS((void)parse_body_spec("halfspace 2"), ContractError);
    CHECK_THROWS_AS((void)parse_body_spec("blob 1"), ContractError);
}

TEST_CASE("boundary generators produce the documented data") {
    const fields::GinzburgLandauField gl(v2(1, 1));
    const fields::TripleWellGradientField tw(Eigen::Vector2d(0, 1), Eigen::Vector2d(0, -1),
                                             Eigen::Vector2d(-1, 0));
    const Table empty;

    const auto radial = make_bc_2d("radial_unit", gl, -5, 5, empty);
    CHECK((radial(3, 4) - v2(0.6, 0.8)).norm() <= 1e-15);
    CHECK_THROWS_AS((void)radial(0, 0), ContractError);

    const auto phase = make_bc_2d("three_phase", tw, -5, 5, empty);
    CHECK((phase(0, 5) - v2(0, 1)).norm() == 0.0);
    CHECK((phase(0, -5) - v2(0, -1)).norm() == 0.0);
    CHECK((phase(-5, 0) - v2(-1, 0)).norm() == 0.0);
    // Equidistant between the first and second well: the earlier one wins.
    CHECK((phase(5, 0) - v2(0, 1)).norm() == 0.0);
    CHECK_THROWS_AS((void)make_bc_2d("three_phase", gl, -5, 5, empty), ContractError);

    const Table amp = parse_scenario_text("amp = 0.25\n").root;
    const auto sine = make_bc_2d("symmetric_sine", gl, -5, 5, amp);
    const Vec s = sine(2.5, 0);
    CHECK(s(0) == doctest::Approx(0.25 * std::sin(M_PI / 4)).epsilon(1e-14));
    CHECK(s(0) == s(1));
    const auto sine_default = make_bc_2d("symmetric_sine", gl, -5, 5, empty);
    CHECK(sine_default(2.5, 0)(0) == doctest::Approx(0.5 * std::sin(M_PI / 4)).epsilon(1e-14));

    const Table cval = parse_scenario_text("value = [0.25, -0.5]\n").root;
    const auto constant = make_bc_2d("constant", gl, -5, 5, cval);
    CHECK((constant(1, 2) - v2(0.25, -0.5)).norm() == 0.0);
    const Table cbad = parse_scenario_text("value = [0.25]\n").root;
    CHECK_THROWS_AS((void)make_bc_2d("constant", gl, -5, 5, cbad), ContractError);
    CHECK_THROWS_AS((void)make_bc_2d("constant", gl, -5, 5, empty), ParseError);

    CHECK_THROWS_AS((void)make_bc_2d("wavy", gl, -5, 5, empty), ContractError);
}

TEST_CASE("a bundled scenario runs end to end and writes its report") {
    const auto dir = fresh_dir("scenario_run");
    RunOptions opts;
    opts.output_dir = dir.string();
    opts.quiet = true;
    const RunResult res = run_scenario(scenario_path("gl_flipped.toml"), opts);

    CHECK(res.all_expected);
    CHECK(res.report["scenario"] == "gl_flipped");
    CHECK(res.report["version"] == std::string(kVersion));
    CHECK(res.report["all_expected"] == true);
    REQUIRE(res.report["tasks"].size() >= 1);
    CHECK(res.report["tasks"][0]["outcome"] == "fail");
    CHECK(res.report["tasks"][0]["expect"] == "fail");
    const double margin = res.report["tasks"][0]["certificate"]["worst_margin"];
    CHECK(margin == doctest::Approx(-6.0).epsilon(1e-6));

    REQUIRE(std::filesystem::exists(res.report_path));
    std::ifstream in(res.report_path);
    const auto from_disk = nlohmann::ordered_json::parse(in);
    CHECK(from_disk == res.report);
}

TEST_CASE("scenario reports differ only in the timestamp across reruns") {
    const auto a = fresh_dir("scenario_rerun_a");
    const auto b = fresh_dir("scenario_rerun_b");
    RunOptions opts;
    opts.quiet = true;
    opts.output_dir = a.string();
    auto ra = run_scenario(scenario_path("gl_flipped.toml"), opts).report;
    opts.output_dir = b.string();
    auto rb = run_scenario(scenario_path("gl_flipped.toml"), opts).report;
    ra.erase("timestamp");
    rb.erase("timestamp");
    CHECK(ra.dump() == rb.dump());
}

TEST_CASE("the output environment variable supplies the default directory") {
    const auto dir = fresh_dir("scenario_env");
    setenv(kOutputEnvVar, dir.string().c_str(), 1);
    RunOptions opts;
    opts.quiet = true; // no output_dir: the environment decides
    const RunResult res = run_scenario(scenario_path("gl_flipped.toml"), opts);
    unsetenv(kOutputEnvVar);
    CHECK(res.report_path.rfind(dir.string(), 0) == 0);
    CHECK(std::filesystem::exists(res.report_path));
}

TEST_CASE("scenario runs reject missing files and unknown tasks") {
    CHECK_THROWS_AS((void)run_scenario("/nonexistent/confine.toml"), NumericsError);

    const auto dir = fresh_dir("scenario_bad");
    const auto path = dir / "bad.toml";
    {
        std::ofstream out(path);
        out << "name = \"bad\"\nseed = 1\n\n[field]\nkind = \"gl\"\na = [1, 1]\n\n"
            << "[[task]]\nkind = \"levitate\"\n";
    }
    RunOptions opts;
    opts.quiet = true;
    opts.output_dir = dir.string();
    CHECK_THROWS_AS((void)run_scenario(path.string(), opts), ParseError);
}
