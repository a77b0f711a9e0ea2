#include "cutfem/space.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cutfem;

namespace {

const auto everywhere = LevelSetDomain::half_plane({1.0, 0.0}, 100.0);

const std::vector<ElementFamily> families = {ElementFamily::lagrange(1), ElementFamily::lagrange(2),
                                             ElementFamily::hermite(3), ElementFamily::hermite(5)};

} // namespace

TEST(Basis1d, HermiteOneIsLinearHats)
{
    const auto b = hermite_basis_1d<double>(1);
    for (double t : {0.0, 0.3, 1.0, 2.0})
    {
        EXPECT_NEAR(b.eval(0, t, 0), 1 - t, 1e-15);
        EXPECT_NEAR(b.eval(1, t, 0), t, 1e-15);
    }
}

TEST(Basis1d, HermiteThreeClosedForm)
{
    const auto b = hermite_basis_1d<double>(3);
    for (double t : {-0.5, 0.0, 0.25, 0.7, 1.0, 1.8})
    {
        EXPECT_NEAR(b.eval(0, t, 0), 1 - 3 * t * t + 2 * t * t * t, 1e-14);
        EXPECT_NEAR(b.eval(1, t, 0), t - 2 * t * t + t * t * t, 1e-14);
        EXPECT_NEAR(b.eval(1, t, 1), 1 - 4 * t + 3 * t * t, 1e-14);
    }
}

TEST(Basis1d, ScalarTemplateAgrees)
{
    const auto d = hermite_basis_1d<double>(5);
    const auto l = hermite_basis_1d<long double>(5);
    for (int f = 0; f < 6; ++f)
        for (int m = 0; m <= 3; ++m)
            EXPECT_NEAR(d.eval(f, 0.37, m), static_cast<double>(l.eval(f, 0.37L, m)), 1e-10);
}

TEST(Basis1d, UnsupportedOrders)
{
    EXPECT_THROW(lagrange_basis_1d<double>(3), std::invalid_argument);
    EXPECT_THROW(hermite_basis_1d<double>(4), std::invalid_argument);
    EXPECT_THROW(ElementFamily::hermite(7), std::invalid_argument);
    EXPECT_THROW(ElementFamily::lagrange(0), std::invalid_argument);
}

TEST(ReferenceElement, KroneckerMatrixIsIdentity)
{
    for (const auto& f : families)
    {
        const auto& ref = reference_element(f);
        EXPECT_LT((ref.kronecker_matrix() - Eigen::MatrixXd::Identity(ref.size(), ref.size())).cwiseAbs().maxCoeff(),
                  1e-12)
            << f.name();
    }
}

TEST(ReferenceElement, ExtrapolatesCanonically)
{
    EXPECT_NEAR(evaluate_shape(ElementFamily::lagrange(1), 0, {2.0, 0.0}, {0, 0}), -1.0, 1e-15);
    EXPECT_THROW(evaluate_shape(ElementFamily::lagrange(1), 4, {0, 0}, {0, 0}), std::out_of_range);
}

TEST(ReferenceElement, PolynomialReproducedOutsideCell)
{
    // q(x, y) = sum c_ij x^i y^j with i, j <= k lies in the tensor span
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& f : families)
    {
        const auto& ref = reference_element(f);
        const int k = f.order;
        Eigen::MatrixXd c(k + 1, k + 1);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j)
                c(i, j) = u(rng);
        const Field q = Field::polynomial(c);
        for (int s = 0; s < 20; ++s)
        {
            const Vec2 x(0.5 + 1.5 * u(rng), 0.5 + 1.5 * u(rng));
            double v = 0.0;
            for (int l = 0; l < ref.size(); ++l)
            {
                const auto al = ref.alpha(l);
                v += q.derivative(ref.node(l), al[0], al[1]) * evaluate_shape(f, l, x, {0, 0});
            }
            EXPECT_NEAR(v, q(x), 1e-12 * (1 + std::abs(q(x)))) << f.name();
        }
    }
}

TEST(ReferenceElement, DerivativesMatchFiniteDifferences)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    const double d = 1e-5;
    for (const auto& f : families)
        for (int s = 0; s < 100; ++s)
        {
            const int l = static_cast<int>(rng() % f.dofs_per_cell());
            const Vec2 x(u(rng), u(rng));
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; a + b <= 2; ++b)
                {
                    const double fx = (evaluate_shape(f, l, x + Vec2(d, 0), {a, b}) -
                                       evaluate_shape(f, l, x - Vec2(d, 0), {a, b})) / (2 * d);
                    const double fy = (evaluate_shape(f, l, x + Vec2(0, d), {a, b}) -
                                       evaluate_shape(f, l, x - Vec2(0, d), {a, b})) / (2 * d);
                    EXPECT_NEAR(fx, evaluate_shape(f, l, x, {a + 1, b}), 1e-6) << f.name();
                    EXPECT_NEAR(fy, evaluate_shape(f, l, x, {a, b + 1}), 1e-6) << f.name();
                }
        }
}

TEST(ReferenceElement, PartitionOfUnity)
{
    for (const auto& f : families)
    {
        const auto& ref = reference_element(f);
        for (const Vec2 t : {Vec2(0.1, 0.2), Vec2(0.5, 0.9), Vec2(-0.3, 1.4)})
        {
            double s = 0.0;
            for (int l = 0; l < ref.size(); ++l)
                if (ref.alpha(l) == std::array<int, 2>{0, 0})
                    s += ref.evaluate(l, t, 0, 0);
            EXPECT_NEAR(s, 1.0, 1e-13) << f.name();
        }
    }
}

TEST(CellBasis, HermiteDerivativeDofsArePhysical)
{
    // the x-slope function of the lower-left corner has unit physical slope there
    const Cell cell{{0.3, -0.2}, 0.125};
    CellBasis basis(reference_element(ElementFamily::hermite(3)), cell);
    basis.tabulate(cell.lo, 1);
    const auto& ref = reference_element(ElementFamily::hermite(3));
    for (int l = 0; l < ref.size(); ++l)
    {
        const auto al = ref.alpha(l);
        const bool at_origin = ref.node(l) == Vec2(0, 0);
        const bool slope = at_origin && al[0] == 1 && al[1] == 0, value = at_origin && al[0] == 0 && al[1] == 0;
        EXPECT_NEAR(basis.d(1, 0)[l], slope ? 1.0 : 0.0, 1e-13);
        EXPECT_NEAR(basis.d(0, 0)[l], value ? 1.0 : 0.0, 1e-13);
    }
}

TEST(DofMap, Counts)
{
    const auto strip = build_active_mesh(BackgroundGrid{{0, 0}, 2, 1, 1.0}, everywhere);
    EXPECT_EQ(build_dof_map(strip, ElementFamily::lagrange(1)).size(), 6);
    EXPECT_EQ(build_dof_map(strip, ElementFamily::lagrange(2)).size(), 15);
    const auto square = build_active_mesh(BackgroundGrid{{0, 0}, 2, 2, 1.0}, everywhere);
    EXPECT_EQ(build_dof_map(square, ElementFamily::hermite(3)).size(), 36);
    EXPECT_EQ(build_dof_map(square, ElementFamily::hermite(5)).size(), 81);
}

TEST(DofMap, DiscInteriorDofsAreTheCentralBlockVertices)
{
    const auto m = build_active_mesh(BackgroundGrid{{0, 0}, 4, 4, 0.25}, LevelSetDomain::circle({0.5, 0.5}, 0.5));
    const auto d = build_dof_map(m, ElementFamily::lagrange(1));
    ASSERT_EQ(d.num_reduced(), 9);
    for (int g : d.interior_dofs)
    {
        const Vec2 x = d.nodes[g].xi;
        EXPECT_GE(x.minCoeff(), 0.25 - 1e-15);
        EXPECT_LE(x.maxCoeff(), 0.75 + 1e-15);
    }
    EXPECT_EQ(d.num_reduced() + static_cast<int>(d.band_dofs.size()), d.size());
}

TEST(DofMap, HermiteNodeSharesClassification)
{
    const auto m = build_active_mesh(BackgroundGrid{{0, 0}, 8, 8, 0.125}, LevelSetDomain::circle({0.5, 0.5}, 0.4));
    const auto d = build_dof_map(m, ElementFamily::hermite(5));
    for (int g = 0; g < d.size(); ++g)
        for (int h = 0; h < d.size(); ++h)
            if ((d.nodes[g].xi - d.nodes[h].xi).norm() < 1e-14)
                EXPECT_EQ(d.is_interior(g), d.is_interior(h));
}

TEST(FemSpaceProperty, HermiteConformity)
{
    // value and derivatives up to order l agree across every interior edge
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k : {3, 5})
    {
        const auto space = make_cut_space(BackgroundGrid{{0, 0}, 3, 3, 1.0 / 3}, everywhere, ElementFamily::hermite(k));
        Eigen::VectorXd v(space.num_full());
        for (int i = 0; i < v.size(); ++i)
            v[i] = u(rng);
        const int l = (k - 1) / 2;
        const auto& grid = space.mesh.grid;
        double worst = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i)
                for (int dir = 0; dir < 2; ++dir)
                {
                    const int ni = i + (dir == 0), nj = j + (dir == 1);
                    if (ni >= 3 || nj >= 3)
                        continue;
                    const int a = space.mesh.active_index[grid.cell_index(i, j)];
                    const int b = space.mesh.active_index[grid.cell_index(ni, nj)];
                    const Cell cb = grid.cell(grid.cell_index(ni, nj));
                    for (int s = 0; s < 10; ++s)
                    {
                        const double t = (s + 0.5) / 10.0;
                        const Vec2 x = dir == 0 ? Vec2(cb.lo.x(), cb.lo.y() + t * cb.size)
                                                : Vec2(cb.lo.x() + t * cb.size, cb.lo.y());
                        for (int p = 0; p <= l; ++p)
                            for (int q = 0; p + q <= l; ++q)
                                worst = std::max(worst, std::abs(evaluate_function(space, v, a, x, p, q) -
                                                                 evaluate_function(space, v, b, x, p, q)));
                    }
                }
        EXPECT_LT(worst, 1e-10) << k;
    }
}

TEST(FemSpaceProperty, NodalValuesOfConstant)
{
    const auto m = build_active_mesh(BackgroundGrid{{0, 0}, 2, 2, 0.5}, everywhere);
    const auto d = build_dof_map(m, ElementFamily::hermite(5));
    const auto v = nodal_values(d, Field::constant(2.5));
    for (int g = 0; g < d.size(); ++g)
        EXPECT_EQ(v[g], d.nodes[g].alpha[0] + d.nodes[g].alpha[1] == 0 ? 2.5 : 0.0);
}
