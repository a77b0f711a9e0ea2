#pragma once

#include "cutfem/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace cutfem {

/// Smooth scalar function given through its partial derivatives:
/// `derivative(x, a, b)` returns d^a/dx^a d^b/dy^b f at x.
class Field
{
public:
    using Fn = std::function<double(const Vec2&, int, int)>;

    Field() = default;
    explicit Field(Fn fn) : fn_(std::move(fn)) {}

    double operator()(const Vec2& x) const { return fn_(x, 0, 0); }
    double derivative(const Vec2& x, int a, int b) const { return fn_(x, a, b); }
    Vec2 gradient(const Vec2& x) const { return {fn_(x, 1, 0), fn_(x, 0, 1)}; }
    double laplacian(const Vec2& x) const { return fn_(x, 2, 0) + fn_(x, 0, 2); }
    explicit operator bool() const { return static_cast<bool>(fn_); }

    static Field constant(double c);
    /// (x - center)^i (y - center)^j weighted by coeffs(i, j).
    static Field polynomial(const Eigen::MatrixXd& coeffs, const Vec2& center = Vec2::Zero());
    /// g(|x - center|^2) for the power series g(s) = sum_n series[n] s^n.
    static Field radial_series(const Eigen::VectorXd& series, const Vec2& center = Vec2::Zero());

private:
    Fn fn_;
};

Field operator+(const Field& f, const Field& g);
Field operator*(double s, const Field& f);

/// Laplacian of a field, as a field (all derivatives available).
Field laplacian(const Field& f);

/// Coefficient matrix of the product of two 1D polynomials p(x) q(y).
Eigen::MatrixXd tensor_polynomial(const Eigen::VectorXd& px, const Eigen::VectorXd& py);

/// Power-series coefficients of cos(pi sqrt(s)), so radial_series gives cos(pi r).
Eigen::VectorXd cos_pi_sqrt_series(int terms = 40);

} // namespace cutfem
