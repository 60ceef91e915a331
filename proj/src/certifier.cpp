#include "confine/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace confine::certifier {

std::string to_string(CertStatus s) {
    switch (s) {
        case CertStatus::Pass: return "pass";
        case CertStatus::Fail: return "fail";
        case CertStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(SymmetryVariant v) {
    return v == SymmetryVariant::AsStated ? "as_stated" : "rotated_lemma";
}

double radical_inverse(unsigned long index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

nlohmann::ordered_json Certificate::to_json() const {
    nlohmann::ordered_json j;
    j["status"] = to_string(status);
    j["worst_margin"] = worst_margin;
    j["witness"] = std::vector<double>(witness.data(), witness.data() + witness.size());
    j["samples_used"] = samples_used;
    j["shell"] = {{"inner", shell_inner}, {"outer", shell_outer}};
    j["seed"] = seed;
    j["region"] = region;
    if (!parts.empty()) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& [name, margin] : parts) arr.push_back({{"name", name}, {"margin", margin}});
        j["parts"] = arr;
    }
    return j;
}

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

Vec halton_point(unsigned long index, int dim) {
    require(dim <= 8, "sampler supports at most 8 dimensions");
    Vec p(dim);
    for (int d = 0; d < dim; ++d) p[d] = radical_inverse(index, kPrimes[d]);
    return p;
}

CertStatus status_of(double margin, const CertifyOptions& opts) {
    if (margin <= 0.0) return CertStatus::Fail;
    if (margin <= opts.margin_threshold) return CertStatus::Inconclusive;
    return CertStatus::Pass;
}

/// Shared engine: quasi-random rejection sampling of the margin over a box
/// region, optionally followed by coordinate-search refinement started from
/// the worst samples. Everything runs in a fixed order so certificates are
/// reproducible bit for bit.
Certificate run_sampled_check(int dim, const Vec& box_lo, const Vec& box_hi,
                              const std::function<bool(const Vec&)>& accept,
                              const std::function<double(const Vec&)>& margin, int n_samples,
                              unsigned seed, const CertifyOptions& opts, bool refine) {
    require(n_samples >= 1, "n_samples must be >= 1");
    require(box_lo.size() == dim && box_hi.size() == dim, "sampling box dimension mismatch");
    for (int d = 0; d < dim; ++d)
        require(box_lo[d] < box_hi[d], "sampling box must have positive extent");

    std::vector<Vec> pts;
    std::vector<double> vals;
    pts.reserve(n_samples);
    vals.reserve(n_samples);
    const Vec extent = box_hi - box_lo;
    const long cap = opts.candidate_factor * static_cast<long>(n_samples);
    long evals = 0;
    for (long i = 0; static_cast<int>(pts.size()) < n_samples; ++i) {
        if (i >= cap)
            throw NumericsError("empty sampling region: accepted " +
                                std::to_string(pts.size()) + " of " + std::to_string(cap) +
                                " candidates");
        const Vec p = halton_point(static_cast<unsigned long>(i) + 1 + seed, dim);
        const Vec u = box_lo + p.cwiseProduct(extent);
        if (!accept(u)) continue;
        pts.push_back(u);
        vals.push_back(margin(u));
        ++evals;
    }

    long best_idx = 0;
    for (long i = 1; i < static_cast<long>(vals.size()); ++i)
        if (vals[i] < vals[best_idx]) best_idx = i;
    double best_val = vals[best_idx];
    Vec best_pt = pts[best_idx];

    if (refine) {
        std::vector<long> order(vals.size());
        std::iota(order.begin(), order.end(), 0L);
        std::sort(order.begin(), order.end(), [&](long a, long b) {
            return vals[a] < vals[b] || (vals[a] == vals[b] && a < b);
        });
        const int k = std::min<int>(opts.refine_count, static_cast<int>(order.size()));
        const double step0 = 0.05 * extent.maxCoeff();
        for (int s = 0; s < k; ++s) {
            Vec u = pts[order[s]];
            double fu = vals[order[s]];
            double step = step0;
            long used = 0;
            while (used < opts.refine_budget && step > 1e-12) {
                bool improved = false;
                for (int d = 0; d < dim; ++d) {
                    for (double sgn : {1.0, -1.0}) {
                        Vec v = u;
                        v[d] += sgn * step;
                        if (!accept(v)) continue;
                        const double fv = margin(v);
                        ++used;
                        if (fv < fu) {
                            u = v;
                            fu = fv;
                            improved = true;
                        }
                    }
                }
                if (!improved) step /= 2.0;
            }
            evals += used;
            if (fu < best_val) {
                best_val = fu;
                best_pt = u;
            }
        }
    }

    Certificate c;
    c.status = status_of(best_val, opts);
    c.worst_margin = best_val;
    c.witness = best_pt;
    c.samples_used = evals;
    c.seed = seed;
    return c;
}

std::string box_to_string(const Vec& lo, const Vec& hi) {
    std::ostringstream os;
    os << "box ";
    for (int d = 0; d < lo.size(); ++d) os << (d ? " x " : "") << "[" << lo[d] << "," << hi[d] << "]";
    return os.str();
}

} // namespace

Certificate certify_convex_condition(const fields::VectorField& field,
                                     const geometry::ConvexBody& body, double shell_outer,
                                     int n_samples, unsigned seed, const CertifyOptions& opts) {
    require(field.dimension() == body.dimension(),
            "certify_convex_condition: field/body dimension mismatch");
    require(body.is_bounded(),
            "certify_convex_condition: body must be bounded (use certify_halfspace)");
    require(shell_outer > 1.0, "shell_outer must exceed 1");
    require(shell_outer > opts.shell_inner, "shell_outer must exceed the inner shell factor");

    const geometry::ConvexBody inner = body.dilated(opts.shell_inner);
    const geometry::ConvexBody outer = body.dilated(shell_outer);
    const auto [lo, hi] = outer.bounding_box();

    auto accept = [&](const Vec& u) {
        return inner.signed_distance(u) > 0.0 && outer.signed_distance(u) <= 0.0;
    };
    auto margin = [&](const Vec& u) {
        return (u - body.project_boundary(u)).dot(field.eval(u));
    };

    Certificate c = run_sampled_check(body.dimension(), lo, hi, accept, margin, n_samples, seed,
                                      opts, /*refine=*/true);
    c.shell_inner = opts.shell_inner;
    c.shell_outer = shell_outer;
    std::ostringstream os;
    os << "shell of " << body.describe() << " between dilations " << opts.shell_inner << " and "
       << shell_outer;
    c.region = os.str();
    return c;
}

Certificate certify_halfspace(const fields::VectorField& field, const Vec& e, double L,
                              const Vec& box_lo, const Vec& box_hi, int n_samples, unsigned seed,
                              const CertifyOptions& opts) {
    const int m = field.dimension();
    require(e.size() == m, "certify_halfspace: direction dimension mismatch");
    require(std::abs(e.norm() - 1.0) <= 1e-12, "certify_halfspace: e must be a unit vector");
    require(box_lo.size() == m && box_hi.size() == m, "certify_halfspace: box dimension mismatch");

    // The box must reach past the level; otherwise the sampling region is empty.
    double reach = 0.0;
    for (int d = 0; d < m; ++d) reach += std::max(e[d] * box_lo[d], e[d] * box_hi[d]);
    if (reach <= L + opts.level_band)
        throw NumericsError("empty sampling region: box does not intersect {u.e > L}");

    auto accept = [&](const Vec& u) {
        for (int d = 0; d < m; ++d)
            if (u[d] < box_lo[d] || u[d] > box_hi[d]) return false;
        return u.dot(e) > L + opts.level_band;
    };
    auto margin = [&](const Vec& u) { return field.eval(u).dot(e); };

    Certificate c =
        run_sampled_check(m, box_lo, box_hi, accept, margin, n_samples, seed, opts, true);
    std::ostringstream os;
    os << box_to_string(box_lo, box_hi) << " with u.e > " << L << " + " << opts.level_band;
    c.region = os.str();
    return c;
}

Certificate certify_triangle(const fields::VectorField& field,
                             const geometry::ConvexBody& triangle, int n_samples, unsigned seed,
                             const CertifyOptions& opts) {
    require(triangle.kind() == geometry::BodyKind::Polytope,
            "certify_triangle: body must be a polygon");
    const auto& verts = triangle.polygon_vertices();
    require(verts.size() == 3, "certify_triangle: triangle must have exactly 3 vertices");
    require(field.dimension() == 2, "certify_triangle: field must be planar");

    double diam = 0.0;
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = i + 1; j < 3; ++j) diam = std::max(diam, (verts[i] - verts[j]).norm());

    const auto& normals = triangle.polygon_normals();
    const std::shared_ptr<const fields::VectorField> base(std::shared_ptr<void>(), &field);

    Certificate worst;
    bool have_worst = false;
    long samples_total = 0;
    std::vector<std::pair<std::string, double>> parts;
    bool any_fail = false, any_inconclusive = false;

    for (size_t i = 0; i < 3; ++i) {
        const Eigen::Vector2d n = normals[i];
        const double level = n.dot(verts[i]);
        // Frame with the side on {w1 = 0} and the triangle in {w1 < 0}:
        // w = R u - (level, 0), R = [n^T; t^T] with t the side tangent.
        Mat R(2, 2);
        R << n.x(), n.y(), -n.y(), n.x();
        Vec t(2);
        t << level, 0.0;
        const fields::FrameField side_field(base, R, t);

        const Eigen::Vector2d va = verts[i], vb = verts[(i + 1) % 3];
        const double wa = -n.y() * va.x() + n.x() * va.y();
        const double wb = -n.y() * vb.x() + n.x() * vb.y();
        const double mid = 0.5 * (wa + wb);
        Vec lo(2), hi(2);
        lo << 0.0, mid - 2.0 * diam;
        hi << 2.0 * diam, mid + 2.0 * diam;
        Vec e1(2);
        e1 << 1.0, 0.0;

        Certificate side =
            certify_halfspace(side_field, e1, 0.0, lo, hi, n_samples, seed, opts);
        samples_total += side.samples_used;
        std::ostringstream name;
        name << "side " << i << " ((" << va.x() << "," << va.y() << ")-(" << vb.x() << ","
             << vb.y() << "))";
        parts.emplace_back(name.str(), side.worst_margin);
        if (side.status == CertStatus::Fail) any_fail = true;
        if (side.status == CertStatus::Inconclusive) any_inconclusive = true;
        if (!have_worst || side.worst_margin < worst.worst_margin) {
            worst = side;
            worst.witness = side_field.base_point(side.witness);
            have_worst = true;
        }
    }

    Certificate c = worst;
    c.status = any_fail ? CertStatus::Fail
                        : (any_inconclusive ? CertStatus::Inconclusive : CertStatus::Pass);
    c.samples_used = samples_total;
    c.seed = seed;
    c.shell_inner = 0.0;
    c.shell_outer = 0.0;
    c.parts = std::move(parts);
    c.region = "three half-space frames around " + triangle.describe();
    return c;
}

Certificate certify_symmetry_condition(const fields::VectorField& field, SymmetryVariant variant,
                                       const Vec& box_lo, const Vec& box_hi, int n_samples,
                                       unsigned seed, const CertifyOptions& opts) {
    require(field.dimension() == 2, "certify_symmetry_condition: field must be planar");
    require(box_lo.size() == 2 && box_hi.size() == 2,
            "certify_symmetry_condition: box dimension mismatch");

    auto accept = [&](const Vec& u) {
        for (int d = 0; d < 2; ++d)
            if (u[d] < box_lo[d] || u[d] > box_hi[d]) return false;
        return std::abs(u[0] - u[1]) > opts.symmetry_band;
    };
    auto margin = [&](const Vec& u) {
        const Vec F = field.eval(u);
        if (variant == SymmetryVariant::AsStated) return -u[1] * F[0] + u[0] * F[1];
        return (u[0] - u[1]) * (F[0] - F[1]);
    };

    // Sampling only: both margins vanish on the diagonal, so any local
    // refinement would slide toward the excluded band and report a margin
    // that reflects the band width rather than the field.
    Certificate c =
        run_sampled_check(2, box_lo, box_hi, accept, margin, n_samples, seed, opts, false);
    std::ostringstream os;
    os << to_string(variant) << " over " << box_to_string(box_lo, box_hi) << " with |u1-u2| > "
       << opts.symmetry_band;
    c.region = os.str();
    return c;
}

double gl_anisotropic_margin(const Vec& a_diag, const Vec& v) {
    require(a_diag.size() == v.size(), "gl_anisotropic_margin: dimension mismatch");
    for (int i = 0; i < a_diag.size(); ++i)
        require(a_diag[i] > 0.0, "gl_anisotropic_margin: diagonal entries must be positive");
    const Vec w = v.cwiseQuotient(a_diag);
    require(w.squaredNorm() > 1.0,
            "gl_anisotropic_margin: point must lie strictly outside the ellipsoid");
    const Vec v0 = geometry::project_to_ellipsoid(a_diag, v);
    const Vec F = (w.squaredNorm() - 1.0) * w;
    return F.dot(v - v0);
}

} // namespace confine::certifier
