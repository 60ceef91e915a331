#include "confine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace confine::geometry {

namespace {

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b, Eigen::Vector2d* closest = nullptr) {
    const Eigen::Vector2d e = b - a;
    const double len2 = e.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Eigen::Vector2d q = a + t * e;
    if (closest) *closest = q;
    return (p - q).norm();
}

// Root of F(t) = sum_i (a_i w_i / (t + a_i^2))^2 - 1 on (-min_i a_i^2, inf),
// all w_i > 0. F is strictly decreasing there, so the bracketed Newton
// iteration below cannot stall.
double lagrange_root(const Vec& axes, const Vec& w) {
    const int m = static_cast<int>(axes.size());
    double amin2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) amin2 = std::min(amin2, axes[i] * axes[i]);

    auto F = [&](double t) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            const double q = axes[i] * w[i] / (t + axes[i] * axes[i]);
            s += q * q;
        }
        return s - 1.0;
    };
    auto dF = [&](double t) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            const double d = t + axes[i] * axes[i];
            s += -2.0 * axes[i] * axes[i] * w[i] * w[i] / (d * d * d);
        }
        return s;
    };

    // Bracket: F -> +inf as t -> -amin2 from above, F < 0 for large t.
    double lo = -amin2;
    double hi = axes.maxCoeff() * w.norm() + axes.maxCoeff() * axes.maxCoeff();
    while (F(hi) > 0.0) hi *= 2.0;

    // Start from the radial intersection scale: t0 such that |p| ~ radial hit.
    double t = std::max(0.5 * (lo + hi), 0.0);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);

    for (int it = 0; it < 200; ++it) {
        const double f = F(t);
        if (f > 0.0) lo = t; else hi = t;
        if (hi - lo <= 1e-17 * std::max(1.0, std::abs(hi))) break;
        const double df = dF(t);
        double tn = df < 0.0 ? t - f / df : lo - 1.0;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi); // bisection safeguard
        if (tn == t) break;
        t = tn;
    }
    return t;
}

} // namespace

Vec project_to_ellipsoid(const Vec& semi_axes, const Vec& u) {
    const int m = static_cast<int>(semi_axes.size());
    require(u.size() == m, "project_to_ellipsoid: dimension mismatch");

    Vec w = u.cwiseAbs();
    Vec sign(m);
    for (int i = 0; i < m; ++i) sign[i] = u[i] < 0.0 ? -1.0 : 1.0;

    std::vector<int> pos, zero;
    for (int i = 0; i < m; ++i) {
        if (w[i] > 0.0) pos.push_back(i); else zero.push_back(i);
    }

    Vec best = Vec::Zero(m);
    double best_d = std::numeric_limits<double>::infinity();

    if (pos.empty()) {
        // Center point: nearest boundary point lies on the shortest semi-axis.
        int j = 0;
        for (int i = 1; i < m; ++i)
            if (semi_axes[i] < semi_axes[j]) j = i;
        best[j] = semi_axes[j];
        return best;
    }

    // Candidate A: p_i = 0 on the zero coordinates, Lagrange root on the rest.
    {
        Vec sub_axes(static_cast<int>(pos.size())), sub_w(static_cast<int>(pos.size()));
        for (size_t k = 0; k < pos.size(); ++k) {
            sub_axes[static_cast<int>(k)] = semi_axes[pos[k]];
            sub_w[static_cast<int>(k)] = w[pos[k]];
        }
        const double t = lagrange_root(sub_axes, sub_w);
        Vec p = Vec::Zero(m);
        for (size_t k = 0; k < pos.size(); ++k) {
            const int i = pos[k];
            p[i] = semi_axes[i] * semi_axes[i] * w[i] / (t + semi_axes[i] * semi_axes[i]);
        }
        const double d = (w - p).norm();
        if (d < best_d) { best_d = d; best = p; }
    }

    // Candidate B: multiplier pinned at t = -a_j^2 for a zero coordinate j,
    // which can beat candidate A for interior points on a symmetry axis.
    for (const int j : zero) {
        const double aj2 = semi_axes[j] * semi_axes[j];
        bool valid = true;
        Vec p = Vec::Zero(m);
        double s = 0.0;
        for (const int i : pos) {
            const double ai2 = semi_axes[i] * semi_axes[i];
            if (std::abs(ai2 - aj2) <= 0.0) { valid = false; break; }
            p[i] = ai2 * w[i] / (ai2 - aj2);
            s += (p[i] / semi_axes[i]) * (p[i] / semi_axes[i]);
        }
        if (!valid || s >= 1.0) continue;
        p[j] = semi_axes[j] * std::sqrt(1.0 - s);
        const double d = (w - p).norm();
        if (d < best_d) { best_d = d; best = p; }
    }

    return sign.cwiseProduct(best);
}

ConvexBody ConvexBody::ball(double radius, int dim) {
    require(radius > 0.0, "ball radius must be positive");
    require(dim >= 1, "ball dimension must be >= 1");
    ConvexBody b;
    b.kind_ = BodyKind::Ball;
    b.body_ = Ball{radius, dim};
    return b;
}

ConvexBody ConvexBody::ellipsoid(Vec semi_axes) {
    require(semi_axes.size() >= 1, "ellipsoid needs at least one semi-axis");
    for (int i = 0; i < semi_axes.size(); ++i)
        require(semi_axes[i] > 0.0, "ellipsoid semi-axes must be positive");
    ConvexBody b;
    b.kind_ = BodyKind::Ellipsoid;
    b.body_ = Ellipsoid{std::move(semi_axes)};
    return b;
}

ConvexBody ConvexBody::polygon(std::vector<Eigen::Vector2d> vertices) {
    require(vertices.size() >= 3, "polygon needs at least 3 vertices");
    const size_t n = vertices.size();

    double area2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % n];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    require(std::abs(area2) > 1e-12, "degenerate polygon: vertices are collinear");
    if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());

    for (size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d e1 = vertices[(i + 1) % n] - vertices[i];
        const Eigen::Vector2d e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
        const double cross = e1.x() * e2.y() - e1.y() * e2.x();
        require(cross > 1e-12, "polygon must be strictly convex");
    }

    Polygon poly;
    poly.vertices = std::move(vertices);
    poly.normals.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d e = poly.vertices[(i + 1) % n] - poly.vertices[i];
        poly.normals.emplace_back(Eigen::Vector2d(e.y(), -e.x()).normalized());
    }

    ConvexBody b;
    b.kind_ = BodyKind::Polytope;
    b.body_ = std::move(poly);
    return b;
}

ConvexBody ConvexBody::half_space(Vec normal, double level) {
    const double nrm = normal.norm();
    require(nrm > 0.0, "half-space normal must be nonzero");
    ConvexBody b;
    b.kind_ = BodyKind::HalfSpace;
    b.body_ = HalfSpace{normal / nrm, level};
    return b;
}

int ConvexBody::dimension() const {
    switch (kind_) {
        case BodyKind::Ball: return std::get<Ball>(body_).dim;
        case BodyKind::Ellipsoid: return static_cast<int>(std::get<Ellipsoid>(body_).semi_axes.size());
        case BodyKind::Polytope: return 2;
        case BodyKind::HalfSpace: return static_cast<int>(std::get<HalfSpace>(body_).normal.size());
    }
    return 0;
}

void ConvexBody::set_tolerance(double tol) {
    require(tol >= 0.0, "tolerance must be nonnegative");
    tol_ = tol;
}

double ConvexBody::signed_distance(const Vec& u) const {
    require(u.size() == dimension(), "signed_distance: dimension mismatch");
    require(u.allFinite(), "signed_distance: point must be finite");

    switch (kind_) {
        case BodyKind::Ball:
            return u.norm() - std::get<Ball>(body_).radius;
        case BodyKind::Ellipsoid: {
            const Vec& a = std::get<Ellipsoid>(body_).semi_axes;
            const Vec p = project_to_ellipsoid(a, u);
            double level = 0.0;
            for (int i = 0; i < u.size(); ++i) level += (u[i] / a[i]) * (u[i] / a[i]);
            const double dist = (u - p).norm();
            return level < 1.0 ? -dist : dist;
        }
        case BodyKind::Polytope: {
            const auto& poly = std::get<Polygon>(body_);
            const Eigen::Vector2d p(u[0], u[1]);
            double dmin = std::numeric_limits<double>::infinity();
            bool inside = true;
            const size_t n = poly.vertices.size();
            for (size_t i = 0; i < n; ++i) {
                if ((p - poly.vertices[i]).dot(poly.normals[i]) > 0.0) inside = false;
                dmin = std::min(dmin, point_segment_distance(p, poly.vertices[i],
                                                             poly.vertices[(i + 1) % n]));
            }
            return inside ? -dmin : dmin;
        }
        case BodyKind::HalfSpace: {
            const auto& hs = std::get<HalfSpace>(body_);
            return u.dot(hs.normal) - hs.level;
        }
    }
    return 0.0;
}

Vec ConvexBody::project_boundary(const Vec& u) const {
    require(u.size() == dimension(), "project_boundary: dimension mismatch");
    require(u.allFinite(), "project_boundary: point must be finite");

    Vec p;
    switch (kind_) {
        case BodyKind::Ball: {
            const double R = std::get<Ball>(body_).radius;
            const double r = u.norm();
            if (r == 0.0) {
                p = Vec::Zero(u.size());
                p[0] = R; // center: pick the first-axis boundary point
            } else {
                p = (R / r) * u;
            }
            break;
        }
        case BodyKind::Ellipsoid:
            p = project_to_ellipsoid(std::get<Ellipsoid>(body_).semi_axes, u);
            break;
        case BodyKind::Polytope: {
            const auto& poly = std::get<Polygon>(body_);
            const Eigen::Vector2d q(u[0], u[1]);
            double dmin = std::numeric_limits<double>::infinity();
            Eigen::Vector2d best = poly.vertices[0];
            const size_t n = poly.vertices.size();
            for (size_t i = 0; i < n; ++i) {
                Eigen::Vector2d c;
                const double d = point_segment_distance(q, poly.vertices[i],
                                                        poly.vertices[(i + 1) % n], &c);
                if (d < dmin) { dmin = d; best = c; } // ties keep the lowest face index
            }
            p = Vec(2);
            p << best.x(), best.y();
            break;
        }
        case BodyKind::HalfSpace: {
            const auto& hs = std::get<HalfSpace>(body_);
            p = u - (u.dot(hs.normal) - hs.level) * hs.normal;
            break;
        }
    }
    if ((u - p).norm() <= tol_) return u; // already on the boundary
    return p;
}

Vec ConvexBody::outward_normal(const Vec& p) const {
    require(p.size() == dimension(), "outward_normal: dimension mismatch");
    const double d = signed_distance(p);
    if (std::abs(d) > tol_)
        throw ContractError("outward_normal: point is not on the boundary (|d| = " +
                            std::to_string(std::abs(d)) + " > tolerance)");

    switch (kind_) {
        case BodyKind::Ball:
            return p.normalized();
        case BodyKind::Ellipsoid: {
            const Vec& a = std::get<Ellipsoid>(body_).semi_axes;
            Vec g(p.size());
            for (int i = 0; i < p.size(); ++i) g[i] = p[i] / (a[i] * a[i]);
            return g.normalized();
        }
        case BodyKind::Polytope: {
            const auto& poly = std::get<Polygon>(body_);
            const Eigen::Vector2d q(p[0], p[1]);
            const size_t n = poly.vertices.size();
            std::vector<double> dist(n);
            double dmin = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < n; ++i) {
                dist[i] = point_segment_distance(q, poly.vertices[i], poly.vertices[(i + 1) % n]);
                dmin = std::min(dmin, dist[i]);
            }
            Eigen::Vector2d nrm = Eigen::Vector2d::Zero();
            for (size_t i = 0; i < n; ++i)
                if (dist[i] <= dmin + tol_) nrm += poly.normals[i];
            Vec out(2);
            nrm.normalize();
            out << nrm.x(), nrm.y();
            return out;
        }
        case BodyKind::HalfSpace:
            return std::get<HalfSpace>(body_).normal;
    }
    return Vec();
}

Region ConvexBody::classify(const Vec& u, double tol) const {
    require(tol >= 0.0, "classify: tolerance must be nonnegative");
    const double d = signed_distance(u);
    if (d < -tol) return Region::Inside;
    if (d > tol) return Region::Outside;
    return Region::Boundary;
}

ConvexBody ConvexBody::dilated(double factor) const {
    require(factor > 0.0, "dilation factor must be positive");
    require(is_bounded(), "cannot dilate an unbounded body");
    switch (kind_) {
        case BodyKind::Ball: {
            const auto& b = std::get<Ball>(body_);
            ConvexBody out = ball(b.radius * factor, b.dim);
            out.tol_ = tol_;
            return out;
        }
        case BodyKind::Ellipsoid: {
            ConvexBody out = ellipsoid(std::get<Ellipsoid>(body_).semi_axes * factor);
            out.tol_ = tol_;
            return out;
        }
        case BodyKind::Polytope: {
            const auto& poly = std::get<Polygon>(body_);
            const Vec c = center();
            const Eigen::Vector2d c2(c[0], c[1]);
            std::vector<Eigen::Vector2d> verts;
            verts.reserve(poly.vertices.size());
            for (const auto& v : poly.vertices) verts.push_back(c2 + factor * (v - c2));
            ConvexBody out = polygon(std::move(verts));
            out.tol_ = tol_;
            return out;
        }
        default:
            break;
    }
    throw ContractError("dilated: unsupported body");
}

Vec ConvexBody::center() const {
    switch (kind_) {
        case BodyKind::Ball:
            return Vec::Zero(std::get<Ball>(body_).dim);
        case BodyKind::Ellipsoid:
            return Vec::Zero(std::get<Ellipsoid>(body_).semi_axes.size());
        case BodyKind::Polytope: {
            const auto& poly = std::get<Polygon>(body_);
            Eigen::Vector2d c = Eigen::Vector2d::Zero();
            for (const auto& v : poly.vertices) c += v;
            c /= static_cast<double>(poly.vertices.size());
            Vec out(2);
            out << c.x(), c.y();
            return out;
        }
        default:
            throw ContractError("center: unbounded body");
    }
}

std::pair<Vec, Vec> ConvexBody::bounding_box() const {
    require(is_bounded(), "bounding_box: unbounded body");
    const int m = dimension();
    Vec lo(m), hi(m);
    switch (kind_) {
        case BodyKind::Ball: {
            const double R = std::get<Ball>(body_).radius;
            lo.setConstant(-R);
            hi.setConstant(R);
            break;
        }
        case BodyKind::Ellipsoid: {
            const Vec& a = std::get<Ellipsoid>(body_).semi_axes;
            lo = -a;
            hi = a;
            break;
        }
        case BodyKind::Polytope: {
            const auto& poly = std::get<Polygon>(body_);
            lo.setConstant(std::numeric_limits<double>::infinity());
            hi.setConstant(-std::numeric_limits<double>::infinity());
            for (const auto& v : poly.vertices) {
                lo[0] = std::min(lo[0], v.x());
                lo[1] = std::min(lo[1], v.y());
                hi[0] = std::max(hi[0], v.x());
                hi[1] = std::max(hi[1], v.y());
            }
            break;
        }
        default:
            break;
    }
    return {lo, hi};
}

std::string ConvexBody::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case BodyKind::Ball:
            os << "ball(R=" << std::get<Ball>(body_).radius << ", m=" << dimension() << ")";
            break;
        case BodyKind::Ellipsoid: {
            os << "ellipsoid(";
            const Vec& a = std::get<Ellipsoid>(body_).semi_axes;
            for (int i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
            os << ")";
            break;
        }
        case BodyKind::Polytope: {
            os << "polygon(";
            const auto& poly = std::get<Polygon>(body_);
            for (size_t i = 0; i < poly.vertices.size(); ++i) {
                os << (i ? " " : "") << "(" << poly.vertices[i].x() << ","
                   << poly.vertices[i].y() << ")";
            }
            os << ")";
            break;
        }
        case BodyKind::HalfSpace: {
            const auto& hs = std::get<HalfSpace>(body_);
            os << "halfspace(e=(";
            for (int i = 0; i < hs.normal.size(); ++i) os << (i ? "," : "") << hs.normal[i];
            os << "), L=" << hs.level << ")";
            break;
        }
    }
    return os.str();
}

double ConvexBody::ball_radius() const {
    require(kind_ == BodyKind::Ball, "not a ball");
    return std::get<Ball>(body_).radius;
}

const Vec& ConvexBody::ellipsoid_axes() const {
    require(kind_ == BodyKind::Ellipsoid, "not an ellipsoid");
    return std::get<Ellipsoid>(body_).semi_axes;
}

const std::vector<Eigen::Vector2d>& ConvexBody::polygon_vertices() const {
    require(kind_ == BodyKind::Polytope, "not a polygon");
    return std::get<Polygon>(body_).vertices;
}

const std::vector<Eigen::Vector2d>& ConvexBody::polygon_normals() const {
    require(kind_ == BodyKind::Polytope, "not a polygon");
    return std::get<Polygon>(body_).normals;
}

const Vec& ConvexBody::halfspace_normal() const {
    require(kind_ == BodyKind::HalfSpace, "not a half-space");
    return std::get<HalfSpace>(body_).normal;
}

double ConvexBody::halfspace_level() const {
    require(kind_ == BodyKind::HalfSpace, "not a half-space");
    return std::get<HalfSpace>(body_).level;
}

} // namespace confine::geometry
