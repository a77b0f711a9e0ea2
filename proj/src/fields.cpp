#include "cutfem/fields.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace cutfem {

namespace {

double falling_factorial(int n, int k)
{
    double r = 1.0;
    for (int i = 0; i < k; ++i)
        r *= n - i;
    return r;
}

/// Monomial term coef * X^px * Y^py * g^(m)(s) produced by differentiating g(X^2 + Y^2).
struct RadialTerm
{
    double coef;
    int px, py, m;
};

std::vector<RadialTerm> radial_derivative_terms(int a, int b)
{
    std::vector<RadialTerm> terms{{1.0, 0, 0, 0}};
    auto diff = [&](int axis) {
        std::vector<RadialTerm> next;
        for (const auto& t : terms)
        {
            const int p = axis == 0 ? t.px : t.py;
            if (p > 0)
            {
                RadialTerm d = t;
                d.coef *= p;
                (axis == 0 ? d.px : d.py) -= 1;
                next.push_back(d);
            }
            RadialTerm e = t;
            e.coef *= 2.0;
            (axis == 0 ? e.px : e.py) += 1;
            e.m += 1;
            next.push_back(e);
        }
        terms = std::move(next);
    };
    for (int i = 0; i < a; ++i)
        diff(0);
    for (int i = 0; i < b; ++i)
        diff(1);
    return terms;
}

} // namespace

Field Field::constant(double c)
{
    return Field([c](const Vec2&, int a, int b) { return (a == 0 && b == 0) ? c : 0.0; });
}

Field Field::polynomial(const Eigen::MatrixXd& coeffs, const Vec2& center)
{
    return Field([coeffs, center](const Vec2& x, int a, int b) {
        const double X = x.x() - center.x(), Y = x.y() - center.y();
        double sum = 0.0;
        for (int j = static_cast<int>(coeffs.cols()) - 1; j >= b; --j)
        {
            double row = 0.0;
            for (int i = static_cast<int>(coeffs.rows()) - 1; i >= a; --i)
                row = row * X + coeffs(i, j) * falling_factorial(i, a);
            sum = sum * Y + row * falling_factorial(j, b);
        }
        return sum;
    });
}

Field Field::radial_series(const Eigen::VectorXd& series, const Vec2& center)
{
    return Field([series, center](const Vec2& x, int a, int b) {
        const double X = x.x() - center.x(), Y = x.y() - center.y();
        const double s = X * X + Y * Y;
        const int n = static_cast<int>(series.size());
        double result = 0.0;
        for (const auto& t : radial_derivative_terms(a, b))
        {
            double g = 0.0;
            for (int k = n - 1; k >= t.m; --k)
                g = g * s + series[k] * falling_factorial(k, t.m);
            result += t.coef * std::pow(X, t.px) * std::pow(Y, t.py) * g;
        }
        return result;
    });
}

Field operator+(const Field& f, const Field& g)
{
    return Field([f, g](const Vec2& x, int a, int b) { return f.derivative(x, a, b) + g.derivative(x, a, b); });
}

Field operator*(double s, const Field& f)
{
    return Field([s, f](const Vec2& x, int a, int b) { return s * f.derivative(x, a, b); });
}

Field laplacian(const Field& f)
{
    return Field([f](const Vec2& x, int a, int b) { return f.derivative(x, a + 2, b) + f.derivative(x, a, b + 2); });
}

Eigen::MatrixXd tensor_polynomial(const Eigen::VectorXd& px, const Eigen::VectorXd& py)
{
    return px * py.transpose();
}

Eigen::VectorXd cos_pi_sqrt_series(int terms)
{
    Eigen::VectorXd c(terms);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double coef = 1.0;
    for (int n = 0; n < terms; ++n)
    {
        c[n] = coef;
        // (-1)^{n+1} pi^{2n+2} / (2n+2)!
        coef *= -pi2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    }
    return c;
}

} // namespace cutfem
