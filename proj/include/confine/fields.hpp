#pragma once

#include "confine/common.hpp"

#include <memory>
#include <string>
#include <vector>

namespace confine::fields {

/// Right-hand side F: R^m -> R^m of the system Delta u = F(u).
/// Implementations are pure and safe for concurrent use.
class VectorField {
public:
    virtual ~VectorField() = default;

    virtual int dimension() const = 0;

    /// F(u). Throws ContractError on dimension mismatch.
    virtual Vec eval(const Vec& u) const = 0;

    /// Exact Jacobian dF/du at u (all catalog fields are polynomial).
    virtual Mat jacobian(const Vec& u) const = 0;

    virtual std::string describe() const = 0;
};

/// Central finite-difference Jacobian, used by tests as an independent check
/// of the analytic Jacobians.
Mat finite_difference_jacobian(const VectorField& f, const Vec& u, double h = 1e-5);

/// Ginzburg-Landau field in the scaled variable v = A u with A = diag(a):
/// F(v) = (|A^-1 v|^2 - 1) A^-1 v, so that the anisotropic system takes the
/// canonical form Delta v = F(v). The natural confinement body is the
/// ellipsoid {|A^-1 v| < 1} with semi-axes a. With a = (1,...,1) this is the
/// classical field (|u|^2 - 1) u.
class GinzburgLandauField : public VectorField {
public:
    explicit GinzburgLandauField(Vec a_diag);

    int dimension() const override { return static_cast<int>(a_.size()); }
    Vec eval(const Vec& v) const override;
    Mat jacobian(const Vec& v) const override;
    std::string describe() const override;

    const Vec& a_diag() const { return a_; }
    /// Converts a scaled state back to the physical variable u = A^-1 v.
    Vec physical_from_state(const Vec& v) const;

private:
    Vec a_; // diagonal of A, all entries positive
};

/// Gradient of the triple-well potential W(u) = |u-a|^2 |u-b|^2 |u-c|^2 with
/// planar wells a, b, c not on a common line. The gradient is evaluated by
/// the product-rule closed form; see allen_cahn_gradient below.
class TripleWellGradientField : public VectorField {
public:
    TripleWellGradientField(Eigen::Vector2d a, Eigen::Vector2d b, Eigen::Vector2d c);

    int dimension() const override { return 2; }
    Vec eval(const Vec& u) const override;
    Mat jacobian(const Vec& u) const override;
    std::string describe() const override;

    double potential(const Vec& u) const;
    const Eigen::Vector2d& well_a() const { return a_; }
    const Eigen::Vector2d& well_b() const { return b_; }
    const Eigen::Vector2d& well_c() const { return c_; }

private:
    Eigen::Vector2d a_, b_, c_;
};

/// Closed-form gradient of W(u) = |u-a|^2 |u-b|^2 |u-c|^2:
///   2(u-a)|u-b|^2|u-c|^2 + 2(u-b)|u-a|^2|u-c|^2 + 2(u-c)|u-a|^2|u-b|^2.
Vec allen_cahn_gradient(const Vec& u, const Vec& a, const Vec& b, const Vec& c);

/// The potential itself, for finite-difference cross-checks of the gradient.
double triple_well_potential(const Vec& u, const Vec& a, const Vec& b, const Vec& c);

/// Two-component coupled field
///   F1 = g11 (u1^2 - a^2) u1 + g12 u1 u2^2,
///   F2 = g22 (u2^2 - b^2) u2 + g12 u1^2 u2,
/// with a = sqrt(mu)/g11^(1/4), b = sqrt(mu)/g22^(1/4). The wall problem for
/// this system is posed in the segregation regime g12 > sqrt(g11 g22), where
/// solutions stay inside the ellipse u1^2/a^2 + u2^2/b^2 <= 1.
class GrossPitaevskiiField : public VectorField {
public:
    GrossPitaevskiiField(double g11, double g22, double g12, double mu);

    int dimension() const override { return 2; }
    Vec eval(const Vec& u) const override;
    Mat jacobian(const Vec& u) const override;
    std::string describe() const override;

    double g11() const { return g11_; }
    double g22() const { return g22_; }
    double g12() const { return g12_; }
    double mu() const { return mu_; }
    double a() const { return a_; }
    double b() const { return b_; }

private:
    double g11_, g22_, g12_, mu_, a_, b_;
};

struct GpParameters {
    double a;
    double b;
    bool segregation;
};

/// Derived wall parameters: a = sqrt(mu)/g11^(1/4), b = sqrt(mu)/g22^(1/4),
/// and the segregation flag g12 > sqrt(g11 g22). All inputs must be positive.
GpParameters gp_parameters(double g11, double g22, double g12, double mu);

/// Demonstration field for the component-symmetry check:
///   F(u1,u2) = (u1 - u2 + u1^3, u2 - u1 + u2^3),
/// which satisfies (u1-u2)(F1-F2) = (u1-u2)^2 (2 + u1^2 + u1 u2 + u2^2) > 0
/// for u1 != u2, forcing u1 == u2 for bounded entire solutions.
class SymmetryDemoField : public VectorField {
public:
    int dimension() const override { return 2; }
    Vec eval(const Vec& u) const override;
    Mat jacobian(const Vec& u) const override;
    std::string describe() const override;
};

/// One term c * prod_k u_k^e_k of a polynomial component.
struct Monomial {
    double coeff = 0.0;
    std::vector<int> exponents; // one nonnegative exponent per state dimension
};

/// User-defined polynomial field: each component is a list of monomials.
class PolynomialField : public VectorField {
public:
    PolynomialField(int m, std::vector<std::vector<Monomial>> components);

    int dimension() const override { return m_; }
    Vec eval(const Vec& u) const override;
    Mat jacobian(const Vec& u) const override;
    std::string describe() const override;

private:
    int m_;
    std::vector<std::vector<Monomial>> comps_; // comps_[i] = terms of F_i
};

/// Sign-flipped field -F, the standard negative control for the certifier.
class NegatedField : public VectorField {
public:
    explicit NegatedField(std::shared_ptr<const VectorField> base);

    int dimension() const override { return base_->dimension(); }
    Vec eval(const Vec& u) const override { return -base_->eval(u); }
    Mat jacobian(const Vec& u) const override { return -base_->jacobian(u); }
    std::string describe() const override { return "negated(" + base_->describe() + ")"; }

private:
    std::shared_ptr<const VectorField> base_;
};

/// Field expressed in a rotated/translated state frame:
///   G(w) = R F(R^T (w + t)),
/// with R orthogonal. Used for half-space checks along arbitrary directions
/// (mapping a polygon side onto {w1 = 0}) and for equivariance tests
/// (t = 0, R = Q).
class FrameField : public VectorField {
public:
    FrameField(std::shared_ptr<const VectorField> base, Mat R, Vec t);

    int dimension() const override { return base_->dimension(); }
    Vec eval(const Vec& w) const override;
    Mat jacobian(const Vec& w) const override;
    std::string describe() const override;

    /// Maps a frame point w back to the base frame: u = R^T (w + t).
    Vec base_point(const Vec& w) const;

private:
    std::shared_ptr<const VectorField> base_;
    Mat R_;
    Vec t_;
};

} // namespace confine::fields
