#pragma once

#include "confine/common.hpp"
#include "confine/fields.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace confine::solver {

/// Discrete solution of Delta u = F(u) on a 1D interval or a square, with
/// Dirichlet data on the boundary nodes. Values are stored for every node,
/// boundary included; in 2D the flat node index is ix * N + iy.
struct SolutionGrid {
    int grid_dim = 1; // 1 or 2
    int m = 1;        // state components per node
    double lo = -20.0;
    double hi = 20.0; // same extent on both axes in 2D
    int N = 3;        // nodes per axis
    Mat values;       // node_count() x m
    double residual_norm = 0.0;
    long iterations = 0;
    bool converged = false;

    double h() const { return (hi - lo) / (N - 1); }
    long node_count() const { return grid_dim == 1 ? N : static_cast<long>(N) * N; }
    double coord(int i) const { return lo + i * h(); }
    long flat(int ix, int iy) const { return static_cast<long>(ix) * N + iy; }
    bool is_interior(long node) const;
    Vec position(long node) const; // (x) or (x, y)
    Vec value(long node) const { return values.row(node).transpose(); }
};

struct BoundaryData1D {
    Vec left;
    Vec right;
};

/// Boundary values for the square, sampled at boundary nodes.
using BoundaryFn2D = std::function<Vec(double x, double y)>;

struct NewtonOptions {
    double tol = 1e-10;   // max-norm residual target
    int max_iters = 200;  // Newton iterations before giving up
    int max_halvings = 30; // backtracking halvings per iteration
};

struct FlowOptions {
    double tol = 1e-10;       // steady-state tolerance on max|update|/dt
    long max_steps = 2000000; // time steps before giving up
    double dt = 0.0;          // 0 = automatic: min(h^2/4, 0.5/Lipschitz estimate)
};

/// Two-point boundary-value solve of u'' = F(u) on [lo, hi] with Dirichlet
/// values bc, by second-order centered differences and a damped Newton
/// iteration (backtracking on the max-norm residual). The initial guess
/// interpolates the endpoint states along tanh(x):
///   u0(x) = (uL + uR)/2 + (uR - uL)/2 * tanh(x).
/// Non-convergence within max_iters returns converged=false; a singular
/// Jacobian block aborts with NumericsError naming the iteration.
SolutionGrid solve_bvp_1d(const fields::VectorField& field, double lo, double hi,
                          const BoundaryData1D& bc, int N, const NewtonOptions& opts = {});

/// Steady state of the gradient flow u_t = Delta u - F(u) on [lo, hi]^2 by
/// semi-implicit stepping: implicit in the Laplacian (factored once),
/// explicit in F. The initial state is the harmonic extension of the
/// boundary data. Stops when max|update|/dt <= tol; reports the elliptic
/// residual of the final iterate.
SolutionGrid solve_relax_2d(const fields::VectorField& field, double lo, double hi,
                            const BoundaryFn2D& bc, int N, const FlowOptions& opts = {});

/// Max-norm of the discrete operator Delta_h u - F(u) over interior nodes,
/// recomputed from the stored values.
double residual(const SolutionGrid& sol, const fields::VectorField& field);

/// CSV serialization: metadata in leading '#' lines, then one row per node
/// with coordinates, components, and any extra named columns. Numbers are
/// written with 17 significant digits so doubles round-trip exactly.
void save_csv(const SolutionGrid& sol, const std::string& path,
              const std::vector<std::pair<std::string, std::vector<double>>>& extra_columns = {});
SolutionGrid load_csv(const std::string& path);

} // namespace confine::solver
