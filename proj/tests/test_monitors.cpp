#include "doctest.h"

#include "confine/geometry.hpp"
#include "confine/monitors.hpp"
#include "confine/solver.hpp"

#include <cmath>

using namespace confine;
using namespace confine::monitors;
using geometry::ConvexBody;
using solver::SolutionGrid;

namespace {

SolutionGrid make_grid_1d(double lo, double hi, int N, int m) {
    SolutionGrid g;
    g.grid_dim = 1;
    g.m = m;
    g.lo = lo;
    g.hi = hi;
    g.N = N;
    g.values = Mat::Zero(N, m);
    g.converged = true;
    return g;
}

ConvexBody wells_triangle() {
    return ConvexBody::polygon({Eigen::Vector2d(0, 1), Eigen::Vector2d(-1, 0),
                                Eigen::Vector2d(0, -1)});
}

} // namespace

TEST_CASE("confinement report on constant data") {
    const ConvexBody tri = wells_triangle();

    SolutionGrid g = make_grid_1d(0, 1, 5, 2);
    for (int i = 0; i < 5; ++i) {
        g.values(i, 0) = 0.0;
        g.values(i, 1) = 1.0; // a vertex of the triangle
    }
    const MonitorReport rep = confinement_report(g, tri, 1e-9);
    CHECK(rep.kind == "confinement");
    CHECK(std::abs(rep.extremum) <= 1e-12);
    CHECK(rep.pass);
    CHECK(rep.stat_min == doctest::Approx(rep.stat_max).epsilon(1e-12));

    // One escaped node must fail the check and be named as the witness.
    g.values(2, 1) = 2.0; // distance 1 from the nearest vertex (0, 1)
    const MonitorReport bad = confinement_report(g, tri, 1e-9);
    CHECK_FALSE(bad.pass);
    CHECK(bad.extremum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bad.witness_node == 2);
    CHECK(bad.witness_value(0) == 0.0);
    CHECK(bad.witness_value(1) == 2.0);
    CHECK(bad.witness_position(0) == doctest::Approx(0.5));
}

TEST_CASE("confinement report rejects mismatched dimensions") {
    SolutionGrid g = make_grid_1d(0, 1, 5, 1);
    CHECK_THROWS_AS(confinement_report(g, ConvexBody::ball(1.0, 2), 1e-9), ContractError);
}

TEST_CASE("component bound report is exact on constants") {
    SolutionGrid g = make_grid_1d(0, 1, 5, 2);
    for (int i = 0; i < 5; ++i) {
        g.values(i, 0) = 0.7;
        g.values(i, 1) = 0.1;
    }
    Vec e(2);
    e << 1, 0;
    const MonitorReport below = component_bound_report(g, e, 0.9);
    CHECK(below.pass);
    CHECK(below.extremum == doctest::Approx(0.7 - 0.9));

    const MonitorReport above = component_bound_report(g, e, 0.5);
    CHECK_FALSE(above.pass);
    CHECK(above.extremum == doctest::Approx(0.2));

    Vec bad(2);
    bad << 1, 1; // not unit length
    CHECK_THROWS_AS(component_bound_report(g, bad, 0.5), ContractError);
    Vec wrong(3);
    wrong << 1, 0, 0;
    CHECK_THROWS_AS(component_bound_report(g, wrong, 0.5), ContractError);
}

TEST_CASE("pointwise energy bound is exact on constant and linear data") {
    // Constant data: zero gradient, so the bound equals C (|u|^2 - R^2).
    SolutionGrid flat = make_grid_1d(0, 1, 5, 2);
    for (int i = 0; i < 5; ++i) flat.values(i, 0) = 1.0;
    const MonitorReport c = p_function_report(flat, 0.5, 2.0);
    CHECK(c.kind == "p_function");
    CHECK(c.extremum == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(c.stat_min == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(c.stat_mean == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(c.pass);

    // Linear data u = x: both the centered and the one-sided stencils are
    // exact, so P(x) = 1/2 + C (x^2 - R^2) pointwise.
    SolutionGrid lin = make_grid_1d(0, 1, 11, 1);
    for (int i = 0; i < 11; ++i) lin.values(i, 0) = lin.coord(i);
    const MonitorReport p = p_function_report(lin, 1.0, 1.0, 1e-8);
    CHECK(p.extremum == doctest::Approx(0.5).epsilon(1e-12)); // at x = 1
    CHECK(p.stat_min == doctest::Approx(-0.5).epsilon(1e-12)); // at x = 0
    CHECK(p.witness_node == 10);
    CHECK_FALSE(p.pass);

    CHECK_THROWS_AS(p_function_report(lin, 0.0, 1.0), ContractError);
    CHECK_THROWS_AS(p_function_report(lin, 1.0, -2.0), ContractError);
}

TEST_CASE("energy bound tightens monotonically in C on a wall profile") {
    SolutionGrid g = make_grid_1d(-20, 20, 2001, 1);
    for (int i = 0; i < 2001; ++i) g.values(i, 0) = std::tanh(g.coord(i) / std::sqrt(2.0));

    const double p10 = p_function_report(g, 0.10, 1.0).extremum;
    const double p25 = p_function_report(g, 0.25, 1.0).extremum;
    const double p40 = p_function_report(g, 0.40, 1.0).extremum;
    const double p100 = p_function_report(g, 1.00, 1.0).extremum;
    CHECK(p10 >= p25);
    CHECK(p25 >= p40);
    CHECK(p40 >= p100);

    // Small multipliers cannot offset the gradient at the wall core; large
    // ones absorb it everywhere.
    CHECK(p10 > 1e-3);
    CHECK(p25 <= 1e-8);
    CHECK(p100 <= 1e-8);
}

TEST_CASE("symmetry report measures the diagonal collapse") {
    SolutionGrid g = make_grid_1d(0, 1, 5, 2);
    for (int i = 0; i < 5; ++i) {
        g.values(i, 0) = 1.0;
        g.values(i, 1) = 1.0;
    }
    const MonitorReport eq = symmetry_report(g);
    CHECK(eq.pass);
    CHECK(eq.extremum == 0.0);

    g.values(3, 1) = 0.0;
    const MonitorReport neq = symmetry_report(g);
    CHECK_FALSE(neq.pass);
    CHECK(neq.extremum == doctest::Approx(1.0));
    CHECK(neq.witness_node == 3);

    SolutionGrid scalar = make_grid_1d(0, 1, 5, 1);
    CHECK_THROWS_AS(symmetry_report(scalar), ContractError);
}

TEST_CASE("strictness classifies interior, locked, and mixed data") {
    const ConvexBody ball = ConvexBody::ball(1.0, 2);

    SolutionGrid g = make_grid_1d(0, 1, 5, 2);
    // Interior nodes are 1..3; boundary rows are ignored by the classifier.
    g.values(0, 0) = 0.9;
    g.values(4, 0) = 0.9;
    g.values(1, 0) = 0.2;
    g.values(2, 0) = 0.1;
    g.values(3, 0) = 0.0;
    const MonitorReport interior = strictness_report(g, ball);
    CHECK(interior.kind == "strictness");
    CHECK(interior.classification == StrictnessClass::StrictlyInterior);
    CHECK(interior.pass);
    CHECK(interior.extremum == doctest::Approx(0.8).epsilon(1e-12)); // clearance of u = 0.2
    CHECK(interior.witness_value(0) == doctest::Approx(0.2));

    // All interior values hugging the boundary within the band classify as
    // locked even though they sit strictly inside.
    SolutionGrid locked = make_grid_1d(0, 1, 5, 2);
    for (int i = 1; i <= 3; ++i) locked.values(i, 0) = 1.0 - 1e-4;
    const MonitorReport lockrep = strictness_report(locked, ball, 1e-3);
    CHECK(lockrep.classification == StrictnessClass::BoundaryLocked);
    CHECK(lockrep.pass);

    // A value outside plus one deep inside contradicts the dichotomy.
    SolutionGrid mixed = make_grid_1d(0, 1, 5, 2);
    mixed.values(1, 0) = 0.0;
    mixed.values(2, 0) = 1.5;
    mixed.values(3, 0) = 0.0;
    const MonitorReport mixrep = strictness_report(mixed, ball, 1e-3);
    CHECK(mixrep.classification == StrictnessClass::Mixed);
    CHECK_FALSE(mixrep.pass);
    CHECK(mixrep.extremum == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(mixrep.witness_value(0) == doctest::Approx(1.5));

    CHECK(to_string(StrictnessClass::StrictlyInterior) == "strictly_interior");
    CHECK(to_string(StrictnessClass::BoundaryLocked) == "boundary_locked");
    CHECK(to_string(StrictnessClass::Mixed) == "mixed");
}

TEST_CASE("strictness oscillation is the exact diameter of the value set") {
    const ConvexBody ball = ConvexBody::ball(1.0, 2);
    SolutionGrid g = make_grid_1d(0, 1, 3, 2);
    g.values(0, 0) = 0.0;
    g.values(1, 0) = 0.3;
    g.values(2, 1) = -0.2;
    const MonitorReport rep = strictness_report(g, ball);
    CHECK(rep.oscillation == doctest::Approx(std::sqrt(0.13)).epsilon(1e-14));
}

TEST_CASE("per-node columns agree with the reports") {
    const ConvexBody ball = ConvexBody::ball(1.0, 2);
    SolutionGrid g = make_grid_1d(0, 1, 7, 2);
    for (int i = 0; i < 7; ++i) {
        g.values(i, 0) = 0.1 * i;
        g.values(i, 1) = 0.05 * i;
    }
    const std::vector<double> dist = distance_column(g, ball);
    REQUIRE(dist.size() == 7);
    double mx = dist[0];
    for (long i = 0; i < 7; ++i) {
        CHECK(dist[i] == ball.signed_distance(g.value(i)));
        mx = std::max(mx, dist[i]);
    }
    CHECK(confinement_report(g, ball, 0.0).extremum == mx);

    Vec e(2);
    e << 0, 1;
    const std::vector<double> comp = component_column(g, e, 0.2);
    CHECK(comp[6] == doctest::Approx(0.3 - 0.2));
    const std::vector<double> sym = symmetry_column(g);
    CHECK(sym[6] == doctest::Approx(0.3).epsilon(1e-12));
    const std::vector<double> pcol = p_function_column(g, 1.0, 1.0);
    CHECK(pcol.size() == 7);
}

TEST_CASE("reports are pure functions of the grid") {
    const ConvexBody tri = wells_triangle();
    SolutionGrid g = make_grid_1d(-1, 1, 9, 2);
    for (int i = 0; i < 9; ++i) {
        g.values(i, 0) = -0.3 + 0.02 * i;
        g.values(i, 1) = 0.1 * std::sin(1.0 + i);
    }
    const std::string a = confinement_report(g, tri, 1e-9).to_json().dump();
    const std::string b = confinement_report(g, tri, 1e-9).to_json().dump();
    CHECK(a == b);
    const std::string sa = strictness_report(g, tri).to_json().dump();
    const std::string sb = strictness_report(g, tri).to_json().dump();
    CHECK(sa == sb);
    CHECK(sa.find("classification") != std::string::npos);
    CHECK(sa.find("oscillation") != std::string::npos);
}
