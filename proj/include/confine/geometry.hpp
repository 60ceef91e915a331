#pragma once

#include "confine/common.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace confine::geometry {

enum class Region { Inside, Boundary, Outside };

enum class BodyKind { Ball, Ellipsoid, Polytope, HalfSpace };

/// A convex region of state space R^m. Exposes the distance-function
/// machinery used by the confinement conditions: signed distance (negative
/// inside), closest boundary point, and outward unit normals.
///
/// Variants: origin-centered ball, axis-aligned ellipsoid {|A^-1 v| < 1}
/// with A = diag(semi-axes), convex polygon in the plane (counterclockwise
/// vertex order), and a half-space {u . e < level}.
class ConvexBody {
public:
    static ConvexBody ball(double radius, int dim);
    static ConvexBody ellipsoid(Vec semi_axes);
    static ConvexBody polygon(std::vector<Eigen::Vector2d> vertices);
    static ConvexBody half_space(Vec normal, double level);

    BodyKind kind() const { return kind_; }
    int dimension() const;
    bool is_bounded() const { return kind_ != BodyKind::HalfSpace; }
    bool is_strictly_convex() const {
        return kind_ == BodyKind::Ball || kind_ == BodyKind::Ellipsoid;
    }

    double tolerance() const { return tol_; }
    void set_tolerance(double tol);

    /// Signed Euclidean distance to the boundary: d < 0 inside, d > 0
    /// outside, |d| = dist(u, boundary).
    double signed_distance(const Vec& u) const;

    /// Closest point on the boundary. Points already on the boundary
    /// (|d| <= tolerance) are returned unchanged.
    Vec project_boundary(const Vec& u) const;

    /// Outward unit normal at a boundary point p (|d(p)| <= tolerance
    /// required). On polygon edges/vertices where several faces tie, the
    /// adjacent face normals are averaged and renormalized.
    Vec outward_normal(const Vec& p) const;

    Region classify(const Vec& u, double tol) const;

    /// Body scaled by `factor` about its center (bounded bodies only).
    ConvexBody dilated(double factor) const;

    /// Center used for dilation: the origin for ball/ellipsoid, the vertex
    /// centroid for polygons.
    Vec center() const;

    /// Axis-aligned bounding box (bounded bodies only).
    std::pair<Vec, Vec> bounding_box() const;

    std::string describe() const;

    // Variant accessors (throw ContractError on kind mismatch).
    double ball_radius() const;
    const Vec& ellipsoid_axes() const;
    const std::vector<Eigen::Vector2d>& polygon_vertices() const;
    const std::vector<Eigen::Vector2d>& polygon_normals() const;
    const Vec& halfspace_normal() const;
    double halfspace_level() const;

private:
    struct Ball {
        double radius;
        int dim;
    };
    struct Ellipsoid {
        Vec semi_axes;
    };
    struct Polygon {
        std::vector<Eigen::Vector2d> vertices; // counterclockwise
        std::vector<Eigen::Vector2d> normals;  // unit outward, edge i = (v_i, v_{i+1})
    };
    struct HalfSpace {
        Vec normal; // unit
        double level;
    };

    ConvexBody() = default;

    BodyKind kind_ = BodyKind::Ball;
    std::variant<Ball, Ellipsoid, Polygon, HalfSpace> body_;
    double tol_ = 1e-10;
};

/// Closest point on the axis-aligned ellipsoid {sum (v_i/a_i)^2 = 1} to u,
/// by safeguarded Newton on the Lagrange-multiplier equation. Exposed for
/// direct use by the anisotropic margin check.
Vec project_to_ellipsoid(const Vec& semi_axes, const Vec& u);

} // namespace confine::geometry
