#include "confine/fields.hpp"

#include <cmath>
#include <sstream>

namespace confine::fields {

Mat finite_difference_jacobian(const VectorField& f, const Vec& u, double h) {
    const int m = f.dimension();
    require(u.size() == m, "finite_difference_jacobian: dimension mismatch");
    Mat J(m, m);
    for (int j = 0; j < m; ++j) {
        Vec up = u, um = u;
        up[j] += h;
        um[j] -= h;
        J.col(j) = (f.eval(up) - f.eval(um)) / (2.0 * h);
    }
    return J;
}

// ---------------------------------------------------------------- GL

GinzburgLandauField::GinzburgLandauField(Vec a_diag) : a_(std::move(a_diag)) {
    require(a_.size() >= 1, "GL field needs at least one diagonal entry");
    for (int i = 0; i < a_.size(); ++i)
        require(a_[i] > 0.0, "GL diagonal entries must be positive");
}

Vec GinzburgLandauField::eval(const Vec& v) const {
    require(v.size() == a_.size(), "GL eval: dimension mismatch");
    const Vec w = v.cwiseQuotient(a_);
    return (w.squaredNorm() - 1.0) * w;
}

Mat GinzburgLandauField::jacobian(const Vec& v) const {
    require(v.size() == a_.size(), "GL jacobian: dimension mismatch");
    const Vec w = v.cwiseQuotient(a_);
    const int m = dimension();
    // d/dv_j [(|w|^2-1) w_i] = 2 (w_j/a_j) w_i + (|w|^2-1) delta_ij / a_i
    Mat J = 2.0 * w * w.cwiseQuotient(a_).transpose();
    const double s = w.squaredNorm() - 1.0;
    for (int i = 0; i < m; ++i) J(i, i) += s / a_[i];
    return J;
}

std::string GinzburgLandauField::describe() const {
    std::ostringstream os;
    os << "gl(diag=";
    for (int i = 0; i < a_.size(); ++i) os << (i ? "," : "") << a_[i];
    os << ")";
    return os.str();
}

Vec GinzburgLandauField::physical_from_state(const Vec& v) const {
    require(v.size() == a_.size(), "GL physical_from_state: dimension mismatch");
    return v.cwiseQuotient(a_);
}

// ---------------------------------------------------------------- triple well

TripleWellGradientField::TripleWellGradientField(Eigen::Vector2d a, Eigen::Vector2d b,
                                                 Eigen::Vector2d c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    const Eigen::Vector2d e1 = b_ - a_, e2 = c_ - a_;
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    require(std::abs(cross) > 1e-12, "triple-well wells must not lie on a common line");
}

Vec allen_cahn_gradient(const Vec& u, const Vec& a, const Vec& b, const Vec& c) {
    require(u.size() == a.size() && u.size() == b.size() && u.size() == c.size(),
            "allen_cahn_gradient: dimension mismatch");
    const Vec da = u - a, db = u - b, dc = u - c;
    const double fa = da.squaredNorm(), fb = db.squaredNorm(), fc = dc.squaredNorm();
    return 2.0 * (da * (fb * fc) + db * (fa * fc) + dc * (fa * fb));
}

double triple_well_potential(const Vec& u, const Vec& a, const Vec& b, const Vec& c) {
    require(u.size() == a.size() && u.size() == b.size() && u.size() == c.size(),
            "triple_well_potential: dimension mismatch");
    return (u - a).squaredNorm() * (u - b).squaredNorm() * (u - c).squaredNorm();
}

Vec TripleWellGradientField::eval(const Vec& u) const {
    require(u.size() == 2, "triple-well eval: dimension mismatch");
    Vec a(2), b(2), c(2);
    a << a_.x(), a_.y();
    b << b_.x(), b_.y();
    c << c_.x(), c_.y();
    return allen_cahn_gradient(u, a, b, c);
}

Mat TripleWellGradientField::jacobian(const Vec& u) const {
    require(u.size() == 2, "triple-well jacobian: dimension mismatch");
    Eigen::Vector2d p(u[0], u[1]);
    const Eigen::Vector2d da = p - a_, db = p - b_, dc = p - c_;
    const double fa = da.squaredNorm(), fb = db.squaredNorm(), fc = dc.squaredNorm();
    // Hessian of W = fa fb fc: sum over cyclic (p,q,r) of
    //   2 f_q f_r I + 4 (u-p) (f_r (u-q) + f_q (u-r))^T
    Mat H = 2.0 * (fb * fc + fa * fc + fa * fb) * Mat::Identity(2, 2);
    H += 4.0 * da * (fc * db + fb * dc).transpose();
    H += 4.0 * db * (fc * da + fa * dc).transpose();
    H += 4.0 * dc * (fb * da + fa * db).transpose();
    return H;
}

double TripleWellGradientField::potential(const Vec& u) const {
    require(u.size() == 2, "triple-well potential: dimension mismatch");
    Eigen::Vector2d p(u[0], u[1]);
    return (p - a_).squaredNorm() * (p - b_).squaredNorm() * (p - c_).squaredNorm();
}

std::string TripleWellGradientField::describe() const {
    std::ostringstream os;
    os << "triple_well(a=(" << a_.x() << "," << a_.y() << ") b=(" << b_.x() << "," << b_.y()
       << ") c=(" << c_.x() << "," << c_.y() << "))";
    return os.str();
}

// ---------------------------------------------------------------- GP

GpParameters gp_parameters(double g11, double g22, double g12, double mu) {
    require(g11 > 0.0 && g22 > 0.0 && g12 > 0.0 && mu > 0.0,
            "gp_parameters: all parameters must be positive");
    GpParameters p;
    p.a = std::sqrt(mu) / std::pow(g11, 0.25);
    p.b = std::sqrt(mu) / std::pow(g22, 0.25);
    p.segregation = g12 > std::sqrt(g11 * g22);
    return p;
}

GrossPitaevskiiField::GrossPitaevskiiField(double g11, double g22, double g12, double mu)
    : g11_(g11), g22_(g22), g12_(g12), mu_(mu) {
    const GpParameters p = gp_parameters(g11, g22, g12, mu);
    a_ = p.a;
    b_ = p.b;
}

Vec GrossPitaevskiiField::eval(const Vec& u) const {
    require(u.size() == 2, "GP eval: dimension mismatch");
    const double u1 = u[0], u2 = u[1];
    Vec F(2);
    F[0] = g11_ * (u1 * u1 - a_ * a_) * u1 + g12_ * u1 * u2 * u2;
    F[1] = g22_ * (u2 * u2 - b_ * b_) * u2 + g12_ * u1 * u1 * u2;
    return F;
}

Mat GrossPitaevskiiField::jacobian(const Vec& u) const {
    require(u.size() == 2, "GP jacobian: dimension mismatch");
    const double u1 = u[0], u2 = u[1];
    Mat J(2, 2);
    J(0, 0) = g11_ * (3.0 * u1 * u1 - a_ * a_) + g12_ * u2 * u2;
    J(0, 1) = 2.0 * g12_ * u1 * u2;
    J(1, 0) = 2.0 * g12_ * u1 * u2;
    J(1, 1) = g22_ * (3.0 * u2 * u2 - b_ * b_) + g12_ * u1 * u1;
    return J;
}

std::string GrossPitaevskiiField::describe() const {
    std::ostringstream os;
    os << "gp(g11=" << g11_ << ",g22=" << g22_ << ",g12=" << g12_ << ",mu=" << mu_ << ")";
    return os.str();
}

// ---------------------------------------------------------------- symmetry demo

Vec SymmetryDemoField::eval(const Vec& u) const {
    require(u.size() == 2, "symmetry demo eval: dimension mismatch");
    Vec F(2);
    F[0] = u[0] - u[1] + u[0] * u[0] * u[0];
    F[1] = u[1] - u[0] + u[1] * u[1] * u[1];
    return F;
}

Mat SymmetryDemoField::jacobian(const Vec& u) const {
    require(u.size() == 2, "symmetry demo jacobian: dimension mismatch");
    Mat J(2, 2);
    J(0, 0) = 1.0 + 3.0 * u[0] * u[0];
    J(0, 1) = -1.0;
    J(1, 0) = -1.0;
    J(1, 1) = 1.0 + 3.0 * u[1] * u[1];
    return J;
}

std::string SymmetryDemoField::describe() const { return "symmetry_demo"; }

// ---------------------------------------------------------------- polynomial

PolynomialField::PolynomialField(int m, std::vector<std::vector<Monomial>> components)
    : m_(m), comps_(std::move(components)) {
    require(m_ >= 1, "polynomial field dimension must be >= 1");
    require(static_cast<int>(comps_.size()) == m_,
            "polynomial field needs one term list per component");
    for (const auto& terms : comps_) {
        for (const auto& t : terms) {
            require(std::isfinite(t.coeff), "polynomial coefficients must be finite");
            require(static_cast<int>(t.exponents.size()) == m_,
                    "monomial exponent count must equal the field dimension");
            for (int e : t.exponents)
                require(e >= 0, "monomial exponents must be nonnegative");
        }
    }
}

namespace {
double int_pow(double x, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
}
} // namespace

Vec PolynomialField::eval(const Vec& u) const {
    require(u.size() == m_, "polynomial eval: dimension mismatch");
    Vec F = Vec::Zero(m_);
    for (int i = 0; i < m_; ++i) {
        for (const auto& t : comps_[i]) {
            double v = t.coeff;
            for (int k = 0; k < m_; ++k) v *= int_pow(u[k], t.exponents[k]);
            F[i] += v;
        }
    }
    return F;
}

Mat PolynomialField::jacobian(const Vec& u) const {
    require(u.size() == m_, "polynomial jacobian: dimension mismatch");
    Mat J = Mat::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
        for (const auto& t : comps_[i]) {
            for (int j = 0; j < m_; ++j) {
                const int ej = t.exponents[j];
                if (ej == 0) continue;
                double v = t.coeff * ej * int_pow(u[j], ej - 1);
                for (int k = 0; k < m_; ++k)
                    if (k != j) v *= int_pow(u[k], t.exponents[k]);
                J(i, j) += v;
            }
        }
    }
    return J;
}

std::string PolynomialField::describe() const {
    std::ostringstream os;
    os << "polynomial(m=" << m_ << ")";
    return os.str();
}

// ---------------------------------------------------------------- wrappers

NegatedField::NegatedField(std::shared_ptr<const VectorField> base) : base_(std::move(base)) {
    require(base_ != nullptr, "NegatedField: null base field");
}

FrameField::FrameField(std::shared_ptr<const VectorField> base, Mat R, Vec t)
    : base_(std::move(base)), R_(std::move(R)), t_(std::move(t)) {
    require(base_ != nullptr, "FrameField: null base field");
    const int m = base_->dimension();
    require(R_.rows() == m && R_.cols() == m, "FrameField: rotation size mismatch");
    require(t_.size() == m, "FrameField: shift size mismatch");
    require((R_ * R_.transpose() - Mat::Identity(m, m)).norm() < 1e-10,
            "FrameField: R must be orthogonal");
}

Vec FrameField::base_point(const Vec& w) const {
    require(w.size() == dimension(), "FrameField: dimension mismatch");
    return R_.transpose() * (w + t_);
}

Vec FrameField::eval(const Vec& w) const { return R_ * base_->eval(base_point(w)); }

Mat FrameField::jacobian(const Vec& w) const {
    return R_ * base_->jacobian(base_point(w)) * R_.transpose();
}

std::string FrameField::describe() const { return "frame(" + base_->describe() + ")"; }

} // namespace confine::fields
