#pragma once

#include "confine/common.hpp"
#include "confine/fields.hpp"
#include "confine/geometry.hpp"

#include "json.hpp"

#include <string>
#include <utility>
#include <vector>

namespace confine::certifier {

enum class CertStatus { Pass, Fail, Inconclusive };

std::string to_string(CertStatus s);

/// Outcome of a sampled inequality check. A certificate never claims global
/// validity: the checked inequality is quantified over an unbounded region,
/// while the certificate covers the sampled shell/box recorded in `region`.
/// status semantics:
///   pass          worst refined margin > margin_threshold
///   fail          worst refined margin <= 0, attained at `witness`
///   inconclusive  0 < worst refined margin <= margin_threshold
struct Certificate {
    CertStatus status = CertStatus::Inconclusive;
    double worst_margin = 0.0;
    Vec witness;              // point attaining worst_margin
    long samples_used = 0;    // total margin evaluations (samples + refinement)
    double shell_inner = 0.0; // dilation factors bounding the shell (0 when boxed)
    double shell_outer = 0.0;
    unsigned seed = 0;
    std::string region; // human-readable description of the sampled region
    std::vector<std::pair<std::string, double>> parts; // per-side / per-variant margins

    bool passed() const { return status == CertStatus::Pass; }
    nlohmann::ordered_json to_json() const;
};

/// Tuning knobs shared by the certifiers. Defaults are chosen so that
/// repeated runs are deterministic and near-zero margins are reported as
/// inconclusive rather than as proofs.
struct CertifyOptions {
    double margin_threshold = 1e-9; // pass requires margin strictly above this
    int refine_count = 16;          // worst samples used as local-search starts
    int refine_budget = 200;        // margin evaluations per local search
    double shell_inner = 1.001;     // inner dilation factor of the sampling shell
    double level_band = 1e-6;       // half-space samples satisfy u.e > L + band
    double symmetry_band = 1e-6;    // symmetry samples satisfy |u1-u2| > band
    long candidate_factor = 1000;   // rejection-sampling cap: factor * n_samples
};

/// Checks the confinement condition (u - u0) . F(u) > 0 on a shell of
/// quasi-random points outside the body (between the shell_inner and
/// shell_outer dilations), where u0 is the closest boundary point to u.
/// The worst samples are refined by region-constrained coordinate search.
Certificate certify_convex_condition(const fields::VectorField& field,
                                     const geometry::ConvexBody& body, double shell_outer,
                                     int n_samples, unsigned seed,
                                     const CertifyOptions& opts = {});

/// Checks the one-sided condition F(u) . e > 0 on box samples with
/// u . e > L + level_band. e must be a unit vector.
Certificate certify_halfspace(const fields::VectorField& field, const Vec& e, double L,
                              const Vec& box_lo, const Vec& box_hi, int n_samples,
                              unsigned seed, const CertifyOptions& opts = {});

/// Checks confinement to a triangle side by side: each side is mapped by a
/// Euclidean motion onto {w1 = 0} with the triangle in {w1 < 0}, and the
/// half-space check runs on the transformed field. Passes iff all three
/// sides pass; `parts` records the per-side margins.
Certificate certify_triangle(const fields::VectorField& field,
                             const geometry::ConvexBody& triangle, int n_samples = 10000,
                             unsigned seed = 0, const CertifyOptions& opts = {});

/// The two inequality variants behind the component-symmetry conclusion
/// u1 == u2 for planar fields:
///   as_stated      (-u2, u1) . F(u) > 0 for u1 != u2
///   rotated_lemma  (u1 - u2)(F1(u) - F2(u)) > 0 for u1 != u2
/// The variants are genuinely different conditions; callers are expected to
/// report both side by side (see the scenario runner).
enum class SymmetryVariant { AsStated, RotatedLemma };

std::string to_string(SymmetryVariant v);

/// Margin of the chosen symmetry variant over box samples with
/// |u1 - u2| > symmetry_band. Sampling only — local refinement would chase
/// the margin into the excluded band around the diagonal, where both
/// variants degenerate to 0 by construction.
Certificate certify_symmetry_condition(const fields::VectorField& field, SymmetryVariant variant,
                                       const Vec& box_lo, const Vec& box_hi, int n_samples,
                                       unsigned seed, const CertifyOptions& opts = {});

/// Closed-form margin ((|A^-1 v|^2 - 1) A^-1 v) . (v - v0) for the
/// anisotropic Ginzburg-Landau field at an exterior point v, with v0 the
/// closest point on the ellipsoid {|A^-1 v| = 1}. Throws ContractError when
/// v lies in the closed ellipsoid.
double gl_anisotropic_margin(const Vec& a_diag, const Vec& v);

/// Element i (starting at 1) of the base-b van der Corput sequence; the
/// Halton point in dimension d combines the first d prime bases.
double radical_inverse(unsigned long index, unsigned base);

} // namespace confine::certifier
