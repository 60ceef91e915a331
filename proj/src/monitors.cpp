#include "confine/monitors.hpp"

#include <algorithm>
#include <cmath>

namespace confine::monitors {

std::string to_string(StrictnessClass c) {
    switch (c) {
        case StrictnessClass::StrictlyInterior: return "strictly_interior";
        case StrictnessClass::BoundaryLocked: return "boundary_locked";
        case StrictnessClass::Mixed: return "mixed";
    }
    return "?";
}

nlohmann::ordered_json MonitorReport::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["extremum"] = extremum;
    j["witness"] = {
        {"node", witness_node},
        {"position", std::vector<double>(witness_position.data(),
                                         witness_position.data() + witness_position.size())},
        {"value", std::vector<double>(witness_value.data(),
                                      witness_value.data() + witness_value.size())}};
    j["stats"] = {{"min", stat_min}, {"max", stat_max}, {"mean", stat_mean}};
    j["tol"] = tol;
    j["pass"] = pass;
    if (kind == "strictness") {
        j["classification"] = to_string(classification);
        j["oscillation"] = oscillation;
    }
    if (!detail.empty()) j["detail"] = detail;
    return j;
}

namespace {

/// Fills the scalar statistics and the witness of the maximal entry.
void summarize_max(MonitorReport& rep, const solver::SolutionGrid& sol,
                   const std::vector<double>& scalar) {
    long witness = 0;
    double mx = scalar[0], mn = scalar[0], sum = 0.0;
    for (long i = 0; i < static_cast<long>(scalar.size()); ++i) {
        const double v = scalar[i];
        if (v > mx) {
            mx = v;
            witness = i;
        }
        mn = std::min(mn, v);
        sum += v;
    }
    rep.extremum = mx;
    rep.witness_node = witness;
    rep.witness_position = sol.position(witness);
    rep.witness_value = sol.value(witness);
    rep.stat_min = mn;
    rep.stat_max = mx;
    rep.stat_mean = sum / static_cast<double>(scalar.size());
}

/// Componentwise derivative along one grid axis: centered in the interior,
/// second-order one-sided at the ends.
double axis_derivative(double um, double u0, double up, double h, int edge) {
    if (edge == 0) return (up - um) / (2.0 * h);
    if (edge < 0) return (-3.0 * u0 + 4.0 * um + -1.0 * up) / (2.0 * h); // um,up = next two
    return (3.0 * u0 - 4.0 * um + up) / (2.0 * h);                       // um,up = prev two
}

double grad_sq_at(const solver::SolutionGrid& sol, long node) {
    const double h = sol.h();
    double g2 = 0.0;
    if (sol.grid_dim == 1) {
        const long i = node;
        for (int c = 0; c < sol.m; ++c) {
            double d;
            if (i == 0)
                d = axis_derivative(sol.values(1, c), sol.values(0, c), sol.values(2, c), h, -1);
            else if (i == sol.N - 1)
                d = axis_derivative(sol.values(i - 1, c), sol.values(i, c), sol.values(i - 2, c),
                                    h, +1);
            else
                d = axis_derivative(sol.values(i - 1, c), sol.values(i, c), sol.values(i + 1, c),
                                    h, 0);
            g2 += d * d;
        }
        return g2;
    }
    const int ix = static_cast<int>(node / sol.N), iy = static_cast<int>(node % sol.N);
    for (int c = 0; c < sol.m; ++c) {
        double dx, dy;
        if (ix == 0)
            dx = axis_derivative(sol.values(sol.flat(1, iy), c), sol.values(sol.flat(0, iy), c),
                                 sol.values(sol.flat(2, iy), c), h, -1);
        else if (ix == sol.N - 1)
            dx = axis_derivative(sol.values(sol.flat(ix - 1, iy), c),
                                 sol.values(sol.flat(ix, iy), c),
                                 sol.values(sol.flat(ix - 2, iy), c), h, +1);
        else
            dx = axis_derivative(sol.values(sol.flat(ix - 1, iy), c),
                                 sol.values(sol.flat(ix, iy), c),
                                 sol.values(sol.flat(ix + 1, iy), c), h, 0);
        if (iy == 0)
            dy = axis_derivative(sol.values(sol.flat(ix, 1), c), sol.values(sol.flat(ix, 0), c),
                                 sol.values(sol.flat(ix, 2), c), h, -1);
        else if (iy == sol.N - 1)
            dy = axis_derivative(sol.values(sol.flat(ix, iy - 1), c),
                                 sol.values(sol.flat(ix, iy), c),
                                 sol.values(sol.flat(ix, iy - 2), c), h, +1);
        else
            dy = axis_derivative(sol.values(sol.flat(ix, iy - 1), c),
                                 sol.values(sol.flat(ix, iy), c),
                                 sol.values(sol.flat(ix, iy + 1), c), h, 0);
        g2 += dx * dx + dy * dy;
    }
    return g2;
}

} // namespace

std::vector<double> distance_column(const solver::SolutionGrid& sol,
                                    const geometry::ConvexBody& body) {
    require(sol.m == body.dimension(), "distance_column: solution/body dimension mismatch");
    std::vector<double> col(sol.node_count());
    for (long i = 0; i < sol.node_count(); ++i) col[i] = body.signed_distance(sol.value(i));
    return col;
}

std::vector<double> p_function_column(const solver::SolutionGrid& sol, double C, double R) {
    require(C > 0.0 && R > 0.0, "p_function_column: C and R must be positive");
    std::vector<double> col(sol.node_count());
    for (long i = 0; i < sol.node_count(); ++i)
        col[i] = 0.5 * grad_sq_at(sol, i) + C * (sol.value(i).squaredNorm() - R * R);
    return col;
}

std::vector<double> component_column(const solver::SolutionGrid& sol, const Vec& e, double L) {
    require(e.size() == sol.m, "component_column: direction dimension mismatch");
    require(std::abs(e.norm() - 1.0) <= 1e-12, "component_column: e must be a unit vector");
    std::vector<double> col(sol.node_count());
    for (long i = 0; i < sol.node_count(); ++i) col[i] = sol.value(i).dot(e) - L;
    return col;
}

std::vector<double> symmetry_column(const solver::SolutionGrid& sol) {
    require(sol.m == 2, "symmetry_column: solution must have two components");
    std::vector<double> col(sol.node_count());
    for (long i = 0; i < sol.node_count(); ++i)
        col[i] = std::abs(sol.values(i, 0) - sol.values(i, 1));
    return col;
}

MonitorReport confinement_report(const solver::SolutionGrid& sol,
                                 const geometry::ConvexBody& body, double tol) {
    MonitorReport rep;
    rep.kind = "confinement";
    rep.tol = tol;
    summarize_max(rep, sol, distance_column(sol, body));
    rep.pass = rep.extremum <= tol;
    rep.detail = "max signed distance to " + body.describe();
    return rep;
}

MonitorReport strictness_report(const solver::SolutionGrid& sol,
                                const geometry::ConvexBody& body, double band) {
    require(sol.m == body.dimension(), "strictness_report: solution/body dimension mismatch");
    if (band <= 0.0) band = 10.0 * sol.h() * sol.h();

    std::vector<long> interior;
    for (long i = 0; i < sol.node_count(); ++i)
        if (sol.is_interior(i)) interior.push_back(i);
    require(!interior.empty(), "strictness_report: grid has no interior nodes");

    double max_d = -std::numeric_limits<double>::infinity();
    double max_abs_d = 0.0;
    long witness = interior.front();
    double mn = std::numeric_limits<double>::infinity(), mx = -mn, sum = 0.0;
    for (const long i : interior) {
        const double d = body.signed_distance(sol.value(i));
        if (d > max_d) {
            max_d = d;
            witness = i;
        }
        max_abs_d = std::max(max_abs_d, std::abs(d));
        const double clearance = -d;
        mn = std::min(mn, clearance);
        mx = std::max(mx, clearance);
        sum += clearance;
    }

    // Exact diameter of the value set, so constants are distinguishable from
    // genuine profiles.
    double osc = 0.0;
    for (long i = 0; i < sol.node_count(); ++i)
        for (long j = i + 1; j < sol.node_count(); ++j)
            osc = std::max(osc, (sol.values.row(i) - sol.values.row(j)).norm());

    MonitorReport rep;
    rep.kind = "strictness";
    rep.tol = band;
    rep.extremum = -max_d; // minimum interior clearance
    rep.witness_node = witness;
    rep.witness_position = sol.position(witness);
    rep.witness_value = sol.value(witness);
    rep.stat_min = mn;
    rep.stat_max = mx;
    rep.stat_mean = sum / static_cast<double>(interior.size());
    rep.oscillation = osc;

    // Band membership is checked before the sign so that solutions resting
    // on the boundary (d == 0 up to rounding) classify as locked, not mixed.
    if (max_abs_d <= band) rep.classification = StrictnessClass::BoundaryLocked;
    else if (max_d < 0.0) rep.classification = StrictnessClass::StrictlyInterior;
    else rep.classification = StrictnessClass::Mixed;
    rep.pass = rep.classification != StrictnessClass::Mixed;
    rep.detail = to_string(rep.classification);
    return rep;
}

MonitorReport p_function_report(const solver::SolutionGrid& sol, double C, double R, double tol) {
    MonitorReport rep;
    rep.kind = "p_function";
    rep.tol = tol;
    summarize_max(rep, sol, p_function_column(sol, C, R));
    rep.pass = rep.extremum <= tol;
    return rep;
}

MonitorReport component_bound_report(const solver::SolutionGrid& sol, const Vec& e, double L,
                                     double tol) {
    MonitorReport rep;
    rep.kind = "component_bound";
    rep.tol = tol;
    summarize_max(rep, sol, component_column(sol, e, L));
    rep.pass = rep.extremum <= tol;
    return rep;
}

MonitorReport symmetry_report(const solver::SolutionGrid& sol, double tol) {
    MonitorReport rep;
    rep.kind = "symmetry";
    rep.tol = tol;
    summarize_max(rep, sol, symmetry_column(sol));
    rep.pass = rep.extremum <= tol;
    return rep;
}

} // namespace confine::monitors
