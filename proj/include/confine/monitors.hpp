#pragma once

#include "confine/common.hpp"
#include "confine/geometry.hpp"
#include "confine/solver.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace confine::monitors {

/// Discrete Liouville alternative for a converged solution: either the
/// values stay strictly inside the body, or they all sit on its boundary
/// (within a band); anything in between contradicts the dichotomy and is
/// flagged as mixed.
enum class StrictnessClass { StrictlyInterior, BoundaryLocked, Mixed };

std::string to_string(StrictnessClass c);

/// Statistics of one monitored scalar over a solution grid. Reports are pure
/// functions of (solution, parameters) and never re-run solvers, so they can
/// be reproduced from serialized grids alone.
struct MonitorReport {
    std::string kind; // confinement | strictness | p_function | component_bound | symmetry
    double extremum = 0.0;
    long witness_node = -1;
    Vec witness_position;
    Vec witness_value;
    double stat_min = 0.0;
    double stat_max = 0.0;
    double stat_mean = 0.0;
    double tol = 0.0;
    bool pass = false;
    StrictnessClass classification = StrictnessClass::StrictlyInterior; // strictness only
    double oscillation = 0.0;                                           // strictness only
    std::string detail;

    nlohmann::ordered_json to_json() const;
};

/// Confinement check: max over all nodes of the signed distance d(u(x)) to
/// the body; passes iff the maximum is <= tol.
MonitorReport confinement_report(const solver::SolutionGrid& sol,
                                 const geometry::ConvexBody& body, double tol);

/// Strictness check over interior nodes: reports the minimum boundary
/// clearance -d(u(x)) and the solution oscillation max|u(x) - u(y)|, and
/// classifies the solution as strictly_interior (all interior values inside),
/// boundary_locked (all interior values within `band` of the boundary), or
/// mixed (pass=false). band <= 0 selects the default 10 h^2.
MonitorReport strictness_report(const solver::SolutionGrid& sol,
                                const geometry::ConvexBody& body, double band = 0.0);

/// Max over nodes of P(x) = |grad u|^2 / 2 + C (|u|^2 - R^2), with gradients
/// by centered differences (second-order one-sided at the domain edges);
/// passes iff max P <= tol.
MonitorReport p_function_report(const solver::SolutionGrid& sol, double C, double R,
                                double tol = 1e-8);

/// Max over nodes of u(x).e - L for a unit direction e; passes iff <= tol.
MonitorReport component_bound_report(const solver::SolutionGrid& sol, const Vec& e, double L,
                                     double tol = 1e-9);

/// Max over nodes of |u1(x) - u2(x)| for planar states; passes iff <= tol.
MonitorReport symmetry_report(const solver::SolutionGrid& sol, double tol = 1e-8);

/// Per-node columns of the monitored scalars, for CSV export next to the
/// solution values.
std::vector<double> distance_column(const solver::SolutionGrid& sol,
                                    const geometry::ConvexBody& body);
std::vector<double> p_function_column(const solver::SolutionGrid& sol, double C, double R);
std::vector<double> component_column(const solver::SolutionGrid& sol, const Vec& e, double L);
std::vector<double> symmetry_column(const solver::SolutionGrid& sol);

} // namespace confine::monitors
