#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <utility>
#include <stdexcept>
#include <vector>

namespace cutfem {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec2 = Point2<double>;

/// Points, weights and (for embedded-boundary rules) unit outward normals.
struct QuadratureRule
{
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<Vec2> normals;

    int size() const { return static_cast<int>(points.size()); }
    bool empty() const { return points.empty(); }
    bool has_normals() const { return !normals.empty(); }

    double total_weight() const
    {
        double s = 0.0;
        for (double w : weights)
            s += w;
        return s;
    }

    void append(const QuadratureRule& other)
    {
        points.insert(points.end(), other.points.begin(), other.points.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
        normals.insert(normals.end(), other.normals.begin(), other.normals.end());
    }
};

inline constexpr int max_gauss_points = 10;

/// Gauss-Legendre nodes and weights on [0, 1], computed by Newton iteration on P_n.
template <typename Scalar>
struct GaussLegendre
{
    std::vector<Scalar> nodes;
    std::vector<Scalar> weights;

    explicit GaussLegendre(int n)
    {
        if (n < 1 || n > max_gauss_points)
            throw std::invalid_argument("gauss order must be in [1, 10]");
        nodes.resize(n);
        weights.resize(n);
        const Scalar pi = std::numbers::pi_v<Scalar>;
        // returns (P_n(x), P_n'(x))
        auto legendre = [n](Scalar x) {
            Scalar p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            return std::pair<Scalar, Scalar>{p1, n * (x * p1 - p0) / (x * x - 1)};
        };
        for (int i = 0; i < n; ++i)
        {
            Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
            for (int it = 0; it < 100; ++it)
            {
                const auto [p, dp] = legendre(x);
                const Scalar dx = p / dp;
                x -= dx;
                if (std::abs(dx) < Scalar(1e-16))
                    break;
            }
            const Scalar dp = legendre(x).second;
            // map from [-1,1] to [0,1]; nodes ascending
            nodes[n - 1 - i] = (x + 1) / 2;
            weights[n - 1 - i] = Scalar(1) / ((1 - x * x) * dp * dp);
        }
    }
};

/// Cached double-precision table for n = 1..10.
inline const GaussLegendre<double>& gauss_legendre(int n)
{
    static const std::vector<GaussLegendre<double>> tables = [] {
        std::vector<GaussLegendre<double>> t;
        for (int k = 1; k <= max_gauss_points; ++k)
            t.emplace_back(k);
        return t;
    }();
    if (n < 1 || n > max_gauss_points)
        throw std::invalid_argument("gauss order must be in [1, 10]");
    return tables[n - 1];
}

/// Tensor Gauss rule on the square [lo, lo + size]^2.
inline void append_square_rule(QuadratureRule& rule, const Vec2& lo, double size, int n)
{
    const auto& g = gauss_legendre(n);
    const double area = size * size;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
        {
            rule.points.emplace_back(lo.x() + size * g.nodes[i], lo.y() + size * g.nodes[j]);
            rule.weights.push_back(area * g.weights[i] * g.weights[j]);
        }
}

/// Collapsed (Duffy) Gauss rule on a triangle; exact for total degree <= 2n - 2.
inline void append_triangle_rule(QuadratureRule& rule, const Vec2& a, const Vec2& b, const Vec2& c, int n)
{
    const double twice_area = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    if (twice_area <= 0.0)
        return;
    const auto& g = gauss_legendre(n);
    for (int i = 0; i < n; ++i)
    {
        const double u = g.nodes[i];
        for (int j = 0; j < n; ++j)
        {
            const double v = g.nodes[j];
            // (u, v) in [0,1]^2 -> barycentric (1-u, u(1-v), uv)
            const Vec2 p = (1.0 - u) * a + u * (1.0 - v) * b + u * v * c;
            rule.points.push_back(p);
            rule.weights.push_back(twice_area * u * g.weights[i] * g.weights[j]);
        }
    }
}

} // namespace cutfem
