#include "confine/solver.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace confine::solver {

bool SolutionGrid::is_interior(long node) const {
    if (grid_dim == 1) return node > 0 && node < N - 1;
    const long ix = node / N, iy = node % N;
    return ix > 0 && ix < N - 1 && iy > 0 && iy < N - 1;
}

Vec SolutionGrid::position(long node) const {
    if (grid_dim == 1) {
        Vec p(1);
        p << coord(static_cast<int>(node));
        return p;
    }
    Vec p(2);
    p << coord(static_cast<int>(node / N)), coord(static_cast<int>(node % N));
    return p;
}

namespace {

// Residual R_i = (U_{i-1} - 2 U_i + U_{i+1})/h^2 - F(U_i) on interior rows.
Mat bvp_residual(const fields::VectorField& f, const Mat& U, double h) {
    const long N = U.rows();
    const int m = static_cast<int>(U.cols());
    Mat R(N - 2, m);
    const double ih2 = 1.0 / (h * h);
    for (long i = 1; i + 1 < N; ++i) {
        const Vec ui = U.row(i).transpose();
        R.row(i - 1) = ((U.row(i - 1) - 2.0 * U.row(i) + U.row(i + 1)) * ih2).eval() -
                       f.eval(ui).transpose();
    }
    return R;
}

} // namespace

SolutionGrid solve_bvp_1d(const fields::VectorField& field, double lo, double hi,
                          const BoundaryData1D& bc, int N, const NewtonOptions& opts) {
    const int m = field.dimension();
    require(N >= 3, "solve_bvp_1d: N must be >= 3");
    require(hi > lo, "solve_bvp_1d: interval must have positive length");
    require(bc.left.size() == m && bc.right.size() == m,
            "solve_bvp_1d: boundary data dimension mismatch");
    require(bc.left.allFinite() && bc.right.allFinite(),
            "solve_bvp_1d: boundary data must be finite");

    SolutionGrid sol;
    sol.grid_dim = 1;
    sol.m = m;
    sol.lo = lo;
    sol.hi = hi;
    sol.N = N;
    sol.values.resize(N, m);

    const double h = sol.h();
    const Vec mid = 0.5 * (bc.left + bc.right);
    const Vec half = 0.5 * (bc.right - bc.left);
    for (int i = 0; i < N; ++i)
        sol.values.row(i) = (mid + std::tanh(sol.coord(i)) * half).transpose();
    sol.values.row(0) = bc.left.transpose();
    sol.values.row(N - 1) = bc.right.transpose();

    Mat& U = sol.values;
    const long n = N - 2; // interior nodes
    const double ih2 = 1.0 / (h * h);

    Mat R = bvp_residual(field, U, h);
    double res = R.cwiseAbs().maxCoeff();
    long iter = 0;
    while (res > opts.tol && iter < opts.max_iters) {
        ++iter;
        // Block-tridiagonal Newton system: diagonal blocks -2/h^2 I - J(U_i),
        // off-diagonal blocks (1/h^2) I, solved by block elimination.
        std::vector<Eigen::PartialPivLU<Mat>> lus;
        lus.reserve(n);
        std::vector<Vec> ys(n); // forward-substituted right-hand sides
        Mat prev_inv;           // D'_{i-1}^{-1}
        for (long i = 0; i < n; ++i) {
            Mat D = -2.0 * ih2 * Mat::Identity(m, m) - field.jacobian(U.row(i + 1).transpose());
            Vec r = -R.row(i).transpose();
            if (i > 0) {
                D -= (ih2 * ih2) * prev_inv;
                r -= ih2 * (prev_inv * ys[i - 1]);
            }
            lus.emplace_back(D);
            prev_inv = lus.back().solve(Mat::Identity(m, m));
            if (!prev_inv.allFinite())
                throw NumericsError("solve_bvp_1d: singular Jacobian block at Newton iteration " +
                                    std::to_string(iter));
            ys[i] = r;
        }
        Mat delta(n, m);
        Vec next = lus[n - 1].solve(ys[n - 1]);
        delta.row(n - 1) = next.transpose();
        for (long i = n - 2; i >= 0; --i) {
            next = lus[i].solve((ys[i] - ih2 * next).eval());
            delta.row(i) = next.transpose();
        }
        if (!delta.allFinite())
            throw NumericsError("solve_bvp_1d: singular Jacobian block at Newton iteration " +
                                std::to_string(iter));

        // Backtracking: halve the step until the max-norm residual decreases.
        const Mat U_int = U.middleRows(1, n);
        double s = 1.0;
        Mat R_new;
        double res_new = res;
        for (int halving = 0; halving <= opts.max_halvings; ++halving) {
            U.middleRows(1, n) = U_int + s * delta;
            R_new = bvp_residual(field, U, h);
            res_new = R_new.cwiseAbs().maxCoeff();
            if (res_new < res || halving == opts.max_halvings) break;
            s *= 0.5;
        }
        R = R_new;
        res = res_new;
    }

    sol.residual_norm = res;
    sol.iterations = iter;
    sol.converged = res <= opts.tol;
    return sol;
}

SolutionGrid solve_relax_2d(const fields::VectorField& field, double lo, double hi,
                            const BoundaryFn2D& bc, int N, const FlowOptions& opts) {
    const int m = field.dimension();
    require(N >= 3, "solve_relax_2d: N must be >= 3");
    require(hi > lo, "solve_relax_2d: square must have positive extent");
    require(static_cast<bool>(bc), "solve_relax_2d: boundary function missing");

    SolutionGrid sol;
    sol.grid_dim = 2;
    sol.m = m;
    sol.lo = lo;
    sol.hi = hi;
    sol.N = N;
    sol.values = Mat::Zero(sol.node_count(), m);

    const double h = sol.h();
    const double ih2 = 1.0 / (h * h);
    const long n = N - 2;       // interior nodes per axis
    const long nn = n * n;      // interior unknowns per component
    auto intidx = [&](long ix, long iy) { return (ix - 1) * n + (iy - 1); };

    for (int ix = 0; ix < N; ++ix) {
        for (int iy = 0; iy < N; ++iy) {
            if (ix != 0 && ix != N - 1 && iy != 0 && iy != N - 1) continue;
            const Vec v = bc(sol.coord(ix), sol.coord(iy));
            require(v.size() == m, "solve_relax_2d: boundary value dimension mismatch");
            require(v.allFinite(), "solve_relax_2d: boundary value must be finite");
            sol.values.row(sol.flat(ix, iy)) = v.transpose();
        }
    }

    // Interior 5-point Laplacian A (negative definite) and the boundary
    // contribution bcv, so that Delta_h u = A u_int + bcv on interior nodes.
    Eigen::SparseMatrix<double> A(nn, nn);
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(5 * nn);
        for (long ix = 1; ix <= n; ++ix) {
            for (long iy = 1; iy <= n; ++iy) {
                const long k = intidx(ix, iy);
                trip.emplace_back(k, k, -4.0 * ih2);
                if (ix > 1) trip.emplace_back(k, intidx(ix - 1, iy), ih2);
                if (ix < n) trip.emplace_back(k, intidx(ix + 1, iy), ih2);
                if (iy > 1) trip.emplace_back(k, intidx(ix, iy - 1), ih2);
                if (iy < n) trip.emplace_back(k, intidx(ix, iy + 1), ih2);
            }
        }
        A.setFromTriplets(trip.begin(), trip.end());
    }
    Mat bcv = Mat::Zero(nn, m);
    for (long ix = 1; ix <= n; ++ix) {
        for (long iy = 1; iy <= n; ++iy) {
            const long k = intidx(ix, iy);
            if (ix == 1) bcv.row(k) += ih2 * sol.values.row(sol.flat(0, static_cast<int>(iy)));
            if (ix == n) bcv.row(k) += ih2 * sol.values.row(sol.flat(N - 1, static_cast<int>(iy)));
            if (iy == 1) bcv.row(k) += ih2 * sol.values.row(sol.flat(static_cast<int>(ix), 0));
            if (iy == n) bcv.row(k) += ih2 * sol.values.row(sol.flat(static_cast<int>(ix), N - 1));
        }
    }

    // Harmonic extension of the boundary data as the initial state.
    Mat Uint(nn, m);
    {
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> harm(
            Eigen::SparseMatrix<double>(-A));
        if (harm.info() != Eigen::Success)
            throw NumericsError("solve_relax_2d: harmonic-extension factorization failed");
        for (int c = 0; c < m; ++c) Uint.col(c) = harm.solve(bcv.col(c));
    }

    double dt = opts.dt;
    if (dt <= 0.0) {
        // Local Lipschitz estimate of F over the initial state (boundary
        // included) caps the explicit part of the step.
        double lip = 1e-8;
        for (long k = 0; k < nn; ++k) {
            const Mat J = field.jacobian(Uint.row(k).transpose());
            lip = std::max(lip, J.cwiseAbs().rowwise().sum().maxCoeff());
        }
        for (long node = 0; node < sol.node_count(); ++node) {
            if (sol.is_interior(node)) continue;
            const Mat J = field.jacobian(sol.values.row(node).transpose());
            lip = std::max(lip, J.cwiseAbs().rowwise().sum().maxCoeff());
        }
        dt = std::min(h * h / 4.0, 0.5 / lip);
    }

    Eigen::SparseMatrix<double> M(nn, nn);
    {
        Eigen::SparseMatrix<double> I(nn, nn);
        I.setIdentity();
        M = I - dt * A;
    }
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> step(M);
    if (step.info() != Eigen::Success)
        throw NumericsError("solve_relax_2d: time-step factorization failed");

    long steps = 0;
    bool converged = false;
    Mat Fv(nn, m), rhs(nn, m), Unew(nn, m);
    while (steps < opts.max_steps) {
        ++steps;
        for (long k = 0; k < nn; ++k)
            Fv.row(k) = field.eval(Uint.row(k).transpose()).transpose();
        rhs = Uint - dt * Fv + dt * bcv;
        for (int c = 0; c < m; ++c) Unew.col(c) = step.solve(rhs.col(c));
        const double update = (Unew - Uint).cwiseAbs().maxCoeff() / dt;
        Uint.swap(Unew);
        if (update <= opts.tol) {
            converged = true;
            break;
        }
    }

    for (long ix = 1; ix <= n; ++ix)
        for (long iy = 1; iy <= n; ++iy)
            sol.values.row(sol.flat(static_cast<int>(ix), static_cast<int>(iy))) =
                Uint.row(intidx(ix, iy));

    sol.iterations = steps;
    sol.converged = converged;
    sol.residual_norm = residual(sol, field);
    return sol;
}

double residual(const SolutionGrid& sol, const fields::VectorField& field) {
    require(sol.m == field.dimension(), "residual: solution/field dimension mismatch");
    const double ih2 = 1.0 / (sol.h() * sol.h());
    double worst = 0.0;
    if (sol.grid_dim == 1) {
        for (long i = 1; i + 1 < sol.N; ++i) {
            const Vec lap =
                (sol.values.row(i - 1) - 2.0 * sol.values.row(i) + sol.values.row(i + 1))
                    .transpose() *
                ih2;
            worst = std::max(worst,
                             (lap - field.eval(sol.value(i))).cwiseAbs().maxCoeff());
        }
        return worst;
    }
    for (int ix = 1; ix + 1 < sol.N; ++ix) {
        for (int iy = 1; iy + 1 < sol.N; ++iy) {
            const long k = sol.flat(ix, iy);
            const Vec lap = (sol.values.row(sol.flat(ix - 1, iy)) +
                             sol.values.row(sol.flat(ix + 1, iy)) +
                             sol.values.row(sol.flat(ix, iy - 1)) +
                             sol.values.row(sol.flat(ix, iy + 1)) - 4.0 * sol.values.row(k))
                                .transpose() *
                            ih2;
            worst = std::max(worst,
                             (lap - field.eval(sol.value(k))).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void save_csv(const SolutionGrid& sol, const std::string& path,
              const std::vector<std::pair<std::string, std::vector<double>>>& extra_columns) {
    for (const auto& [name, col] : extra_columns)
        require(static_cast<long>(col.size()) == sol.node_count(),
                "save_csv: extra column '" + name + "' has wrong length");

    std::ofstream out(path);
    if (!out) throw NumericsError("save_csv: cannot open '" + path + "' for writing");

    out << "# confine-grid v1\n";
    out << "# grid_dim," << sol.grid_dim << "\n";
    out << "# m," << sol.m << "\n";
    out << "# lo," << fmt17(sol.lo) << "\n";
    out << "# hi," << fmt17(sol.hi) << "\n";
    out << "# N," << sol.N << "\n";
    out << "# residual_norm," << fmt17(sol.residual_norm) << "\n";
    out << "# iterations," << sol.iterations << "\n";
    out << "# converged," << (sol.converged ? 1 : 0) << "\n";

    out << (sol.grid_dim == 1 ? "x" : "x,y");
    for (int c = 0; c < sol.m; ++c) out << ",u" << (c + 1);
    for (const auto& [name, col] : extra_columns) out << "," << name;
    out << "\n";

    for (long node = 0; node < sol.node_count(); ++node) {
        const Vec pos = sol.position(node);
        for (int d = 0; d < pos.size(); ++d) out << (d ? "," : "") << fmt17(pos[d]);
        for (int c = 0; c < sol.m; ++c) out << "," << fmt17(sol.values(node, c));
        for (const auto& [name, col] : extra_columns) out << "," << fmt17(col[node]);
        out << "\n";
    }
    if (!out) throw NumericsError("save_csv: write to '" + path + "' failed");
}

SolutionGrid load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericsError("load_csv: cannot open '" + path + "'");

    SolutionGrid sol;
    std::string line;
    bool header_seen = false;
    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue; // banner line
            const std::string key = line.substr(2, comma - 2);
            const std::string val = line.substr(comma + 1);
            if (key == "grid_dim") sol.grid_dim = std::atoi(val.c_str());
            else if (key == "m") sol.m = std::atoi(val.c_str());
            else if (key == "lo") sol.lo = std::strtod(val.c_str(), nullptr);
            else if (key == "hi") sol.hi = std::strtod(val.c_str(), nullptr);
            else if (key == "N") sol.N = std::atoi(val.c_str());
            else if (key == "residual_norm") sol.residual_norm = std::strtod(val.c_str(), nullptr);
            else if (key == "iterations") sol.iterations = std::atol(val.c_str());
            else if (key == "converged") sol.converged = std::atoi(val.c_str()) != 0;
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            require(sol.grid_dim == 1 || sol.grid_dim == 2, "load_csv: bad grid_dim metadata");
            require(sol.m >= 1 && sol.N >= 3, "load_csv: bad grid metadata");
            sol.values.resize(sol.node_count(), sol.m);
            continue;
        }
        if (row >= sol.node_count())
            throw NumericsError("load_csv: more rows than nodes in '" + path + "'");
        const char* p = line.c_str();
        char* end = nullptr;
        const int skip = sol.grid_dim; // coordinate columns are redundant
        for (int col = 0; col < skip + sol.m; ++col) {
            const double v = std::strtod(p, &end);
            if (end == p)
                throw NumericsError("load_csv: malformed number in row " + std::to_string(row));
            if (col >= skip) sol.values(row, col - skip) = v;
            p = end;
            while (*p == ',' || *p == ' ') ++p;
        }
        ++row;
    }
    if (!header_seen || row != sol.node_count())
        throw NumericsError("load_csv: '" + path + "' is truncated or not a grid file");
    return sol;
}

} // namespace confine::solver
