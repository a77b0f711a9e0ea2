#include "cutfem/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cutfem;

namespace {

const double pi = std::acos(-1.0);

double total_volume(const BackgroundGrid& grid, const LevelSetDomain& d, int gauss, int depth)
{
    double s = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c)
        s += volume_quadrature(grid.cell(c), d, gauss, depth).total_weight();
    return s;
}

double total_surface(const BackgroundGrid& grid, const LevelSetDomain& d, int gauss)
{
    double s = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c)
        s += surface_quadrature(grid.cell(c), d, gauss).total_weight();
    return s;
}

} // namespace

TEST(Classify, SpecExamples)
{
    const auto big = LevelSetDomain::circle({0.5, 0.5}, 2.0);
    const auto small = LevelSetDomain::circle({0.5, 0.5}, 0.1);
    const auto half = LevelSetDomain::half_plane({1.0, 0.0}, 0.5);
    EXPECT_EQ(classify_cell(Cell{{0, 0}, 1.0}, big), CellClass::Inside);
    EXPECT_EQ(classify_cell(Cell{{3, 3}, 1.0}, small), CellClass::Outside);
    EXPECT_EQ(classify_cell(Cell{{0, 0}, 1.0}, half), CellClass::Cut);
}

TEST(Classify, ComplementSwapsInsideAndOutside)
{
    const auto disc = LevelSetDomain::circle({0.0, 0.0}, 1.0);
    const auto out = disc.complement();
    EXPECT_EQ(classify_cell(Cell{{-0.1, -0.1}, 0.2}, out), CellClass::Outside);
    EXPECT_EQ(classify_cell(Cell{{3, 3}, 0.2}, out), CellClass::Inside);
    EXPECT_EQ(classify_cell(Cell{{0.9, -0.1}, 0.2}, out), CellClass::Cut);
}

TEST(Classify, TangentCellIsNotCut)
{
    // circle touching the cell edge x = 1 from the left
    const auto disc = LevelSetDomain::circle({0.5, 0.5}, 0.5);
    EXPECT_EQ(classify_cell(Cell{{1.0, 0.25}, 0.5}, disc), CellClass::Outside);
}

TEST(Domain, GradientIsOutwardAndExact)
{
    const auto disc = LevelSetDomain::circle({0.2, -0.1}, 0.7);
    const Vec2 x(0.9, -0.1);
    EXPECT_NEAR(disc.value(x), 0.0, 1e-15);
    EXPECT_NEAR((disc.normal(x) - Vec2(1, 0)).norm(), 0.0, 1e-14);
    const auto out = disc.complement();
    EXPECT_NEAR((out.normal(x) - Vec2(-1, 0)).norm(), 0.0, 1e-14);
}

TEST(VolumeQuadrature, InsideCellIntegratesPolynomialsExactly)
{
    const auto big = LevelSetDomain::circle({0.0, 0.0}, 10.0);
    const Cell cell{{0.25, -0.5}, 0.5};
    for (int n = 1; n <= max_gauss_points; ++n)
    {
        const auto rule = volume_quadrature(cell, big, n, 0);
        const int p = 2 * n - 1;
        double s = 0.0;
        for (int q = 0; q < rule.size(); ++q)
            s += rule.weights[q] * std::pow(rule.points[q].x(), p) * std::pow(rule.points[q].y(), 1);
        // int x^p over [0.25, 0.75], int y over [-0.5, 0]
        const double ix = (std::pow(0.75, p + 1) - std::pow(0.25, p + 1)) / (p + 1);
        const double iy = (0.0 - 0.25) / 2.0;
        EXPECT_NEAR(s, ix * iy, 1e-14) << n;
    }
    EXPECT_NEAR(volume_quadrature(cell, big, 3, 0).total_weight(), 0.25, 1e-15);
}

TEST(VolumeQuadrature, HalfPlaneHalfCell)
{
    const auto half = LevelSetDomain::half_plane({1.0, 0.0}, 0.5);
    EXPECT_NEAR(volume_quadrature(Cell{{0, 0}, 1.0}, half, 2, 0).total_weight(), 0.5, 1e-15);
}

TEST(VolumeQuadrature, DiscAreaOn64Grid)
{
    const auto disc = LevelSetDomain::circle({0.5, 0.5}, 0.5);
    const BackgroundGrid grid{{0, 0}, 64, 64, 1.0 / 64};
    EXPECT_NEAR(total_volume(grid, disc, 3, 4), pi / 4.0, 1e-5);
}

TEST(VolumeQuadrature, DiscMomentsAreExact)
{
    // second moment of a disc, integrated over an offset grid
    const auto disc = LevelSetDomain::circle({0.1, 0.0}, 0.4);
    const BackgroundGrid grid{{-0.43, -0.47}, 11, 11, 0.09};
    double m = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c)
    {
        const auto rule = volume_quadrature(grid.cell(c), disc, 4, 4);
        for (int q = 0; q < rule.size(); ++q)
            m += rule.weights[q] * (rule.points[q] - Vec2(0.1, 0.0)).squaredNorm();
    }
    EXPECT_NEAR(m, pi * std::pow(0.4, 4) / 2.0, 1e-12);
}

TEST(VolumeQuadrature, RejectsTooManyPoints)
{
    const auto disc = LevelSetDomain::circle({0.0, 0.0}, 1.0);
    EXPECT_THROW(volume_quadrature(Cell{{0, 0}, 0.1}, disc, max_gauss_points + 1, 0), std::invalid_argument);
}

TEST(VolumeQuadrature, WeightsNonnegativeAndPointsInside)
{
    const auto disc = LevelSetDomain::circle({0.03, -0.02}, 0.37);
    const BackgroundGrid grid{{-0.5, -0.5}, 13, 13, 1.0 / 13};
    for (int c = 0; c < grid.num_cells(); ++c)
    {
        const auto rule = volume_quadrature(grid.cell(c), disc, 3, 4);
        for (int q = 0; q < rule.size(); ++q)
        {
            EXPECT_GE(rule.weights[q], 0.0);
            EXPECT_LE(disc.value(rule.points[q]), 1e-12);
        }
    }
}

TEST(SurfaceQuadrature, HalfPlaneSegment)
{
    const auto half = LevelSetDomain::half_plane({1.0, 0.0}, 0.5);
    const auto rule = surface_quadrature(Cell{{0, 0}, 1.0}, half, 3);
    EXPECT_NEAR(rule.total_weight(), 1.0, 1e-15);
    for (const auto& n : rule.normals)
        EXPECT_NEAR((n - Vec2(1, 0)).norm(), 0.0, 1e-15);
}

TEST(SurfaceQuadrature, CirclePerimeterOnSeveralGrids)
{
    const auto disc = LevelSetDomain::circle({0.5, 0.5}, 0.5);
    for (int n : {3, 7, 9, 16, 31})
    {
        const BackgroundGrid grid{{-1.0 / n, -1.0 / n}, n + 2, n + 2, 1.0 / n};
        EXPECT_NEAR(total_surface(grid, disc, 10), pi, 1e-8) << n;
    }
}

TEST(SurfaceQuadrature, PointsOnBoundaryNormalsOutward)
{
    const auto disc = LevelSetDomain::circle({0.1, 0.2}, 0.33);
    const BackgroundGrid grid{{-0.3, -0.2}, 9, 9, 0.1};
    for (int c = 0; c < grid.num_cells(); ++c)
    {
        const auto rule = surface_quadrature(grid.cell(c), disc, 5);
        for (int q = 0; q < rule.size(); ++q)
        {
            EXPECT_NEAR(disc.value(rule.points[q]), 0.0, 1e-12);
            EXPECT_NEAR(rule.normals[q].norm(), 1.0, 1e-12);
            EXPECT_GT(rule.normals[q].dot(disc.gradient(rule.points[q])), 0.0);
        }
    }
}

TEST(SurfaceQuadrature, GrazingCellGivesEmptyRule)
{
    const auto disc = LevelSetDomain::circle({0.5, 0.5}, 0.5);
    EXPECT_TRUE(surface_quadrature(Cell{{1.0, 0.25}, 0.5}, disc, 3).empty());
}

TEST(SurfaceQuadrature, EdgeOnGridLineCountedOnce)
{
    // box edges that coincide with grid lines belong to the cell inside the box
    const auto box = LevelSetDomain::axis_box({0.0, 0.0}, {1.0, 1.0});
    for (int nx : {8, 16, 32, 64})
    {
        const double cs = 1.31 / nx;
        const BackgroundGrid grid{{-0.21, -0.31}, nx, static_cast<int>(std::ceil(1.41 / cs)), cs};
        EXPECT_NEAR(total_surface(grid, box, 3), 4.0, 1e-12) << nx;
        EXPECT_NEAR(total_volume(grid, box, 2, 0), 1.0, 1e-12) << nx;
    }
    const BackgroundGrid fitted{{0, 0}, 4, 4, 0.25};
    EXPECT_NEAR(total_surface(fitted, box, 3), 4.0, 1e-14);
}

TEST(GeometryProperty, DivergenceTheoremOnHalfPlane)
{
    // F = (x^2 y, x y^3): div F = 2xy + 3xy^2
    const Vec2 nrm = Vec2(1.0, 2.0).normalized();
    const auto half = LevelSetDomain::half_plane(nrm, 0.3);
    const BackgroundGrid grid{{-1, -1}, 8, 8, 0.25};
    const auto F = [](const Vec2& x) { return Vec2(x.x() * x.x() * x.y(), x.x() * std::pow(x.y(), 3)); };
    double vol = 0.0, flux = 0.0;
    for (int c = 0; c < grid.num_cells(); ++c)
    {
        const Cell cell = grid.cell(c);
        const auto v = volume_quadrature(cell, half, 4, 0);
        for (int q = 0; q < v.size(); ++q)
        {
            const Vec2& x = v.points[q];
            vol += v.weights[q] * (2 * x.x() * x.y() + 3 * x.x() * x.y() * x.y());
        }
        const auto s = surface_quadrature(cell, half, 4);
        for (int q = 0; q < s.size(); ++q)
            flux += s.weights[q] * F(s.points[q]).dot(s.normals[q]);
    }
    // outer faces of [-1, 1]^2 clipped to x + 2y < 0.3 sqrt(5)
    const double c0 = 0.3 * std::sqrt(5.0);
    const auto& g = gauss_legendre(6);
    auto face = [&](Vec2 a, Vec2 b, Vec2 n) {
        double s = 0.0;
        for (size_t i = 0; i < g.nodes.size(); ++i)
            s += (b - a).norm() * g.weights[i] * F(a + g.nodes[i] * (b - a)).dot(n);
        return s;
    };
    flux += face({-1, -1}, {1, -1}, {0, -1});
    flux += face({1, -1}, {1, (c0 - 1) / 2}, {1, 0});
    flux += face({-1, -1}, {-1, (c0 + 1) / 2}, {-1, 0});
    EXPECT_NEAR(vol, flux, 1e-13);
}

TEST(GeometryProperty, AreaAdditivityUnderRandomOffsets)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int t = 0; t < 5; ++t)
    {
        const Vec2 c(u(rng), u(rng));
        const double r = 0.3 + u(rng);
        const auto disc = LevelSetDomain::circle(c, r);
        const BackgroundGrid grid{{-0.5 + u(rng), -0.5 + u(rng)}, 17, 17, 1.0 / 16};
        EXPECT_NEAR(total_volume(grid, disc, 2, 4), pi * r * r, 1e-12);
    }
}
