#include "cutfem/analysis.hpp"

#include <gtest/gtest.h>

using namespace cutfem;

namespace {

const double pi = std::acos(-1.0);
const auto disc0 = LevelSetDomain::circle(Vec2::Zero(), 0.5);

CutSpace disc_space(int n, ElementFamily f) { return make_cut_space({{-0.5 - 1.0 / n, -0.5 - 1.0 / n}, n + 2, n + 2, 1.0 / n}, disc0, f); }

} // namespace

TEST(ErrorNorms, ExactInSpaceGivesZero)
{
    const auto s = disc_space(8, ElementFamily::lagrange(2));
    Eigen::MatrixXd c(3, 3);
    c << 1, 0.5, -1, 2, 0, 0.3, 0.7, 0.1, 0;
    const Field u = Field::polynomial(c);
    const auto pi_u = interpolate_pi_E(u, s.dofs, s.E);
    const auto e = error_norms(s, pi_u.full, u);
    EXPECT_LT(e.l2, 1e-10);
    EXPECT_LT(e.h1, 1e-10);
    EXPECT_LT(e.h2, 1e-10);
    EXPECT_LT(e.energy_sqrt(), 1e-10);
}

TEST(ErrorNorms, ConstantAndLinear)
{
    const auto s = disc_space(16, ElementFamily::lagrange(1));
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(s.num_full());
    EXPECT_NEAR(error_norms(s, zero, Field::constant(1.0)).l2, std::sqrt(pi / 4), 1e-10);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(1, 0) = 1.0;
    const auto e = error_norms(s, zero, Field::polynomial(c));
    EXPECT_NEAR(e.h1, std::sqrt(pi / 4), 1e-10);
    // the gradient energy is the squared H1 seminorm
    EXPECT_NEAR(e.energy, e.h1 * e.h1, 1e-14);
    EXPECT_NEAR(e.h2, 0.0, 1e-14);
}

TEST(ErrorNorms, Errors)
{
    const auto s = disc_space(8, ElementFamily::lagrange(1));
    EXPECT_THROW(error_norms(s, Eigen::VectorXd::Zero(s.num_full()), Field{}), std::invalid_argument);
    EXPECT_THROW(error_norms(s, Eigen::VectorXd::Zero(3), Field::constant(1.0)), std::invalid_argument);
    EXPECT_THROW(broken_seminorm(s, Eigen::VectorXd::Zero(s.num_full()), 3, CellSet::Active), std::invalid_argument);
}

TEST(ErrorNorms, Combine)
{
    ErrorNorms a{3, 0, 1, 4}, b{4, 0, 1, 5};
    const auto c = combine(a, b);
    EXPECT_DOUBLE_EQ(c.l2, 5.0);
    EXPECT_DOUBLE_EQ(c.h2, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(c.energy, 9.0);
}

TEST(BrokenSeminorm, WholeCells)
{
    const auto s = disc_space(8, ElementFamily::lagrange(1));
    const auto one = interpolate_pi_E(Field::constant(1.0), s.dofs, s.E).full;
    // value norm of 1 is the square root of the covered cell area
    const double cell = 1.0 / 64;
    EXPECT_NEAR(broken_seminorm(s, one, 0, CellSet::Active), std::sqrt(cell * s.mesh.size()), 1e-13);
    EXPECT_NEAR(broken_seminorm(s, one, 0, CellSet::Interior), std::sqrt(cell * s.mesh.num_interior()), 1e-13);
    EXPECT_NEAR(broken_seminorm(s, one, 1, CellSet::Active), 0.0, 1e-12);
}

TEST(Eoc, Examples)
{
    const auto t = eoc_table({{0.1, {1e-2}}, {0.05, {2.5e-3}}});
    ASSERT_EQ(t.size(), 1u);
    EXPECT_NEAR(*t[0][0], 2.0, 1e-14);
    EXPECT_NEAR(*eoc_table({{0.1, {3.0}}, {0.05, {3.0}}})[0][0], 0.0, 1e-15);
    const auto c = eoc_table({{0.4, {0.064}}, {0.2, {0.008}}, {0.1, {0.001}}});
    EXPECT_NEAR(*c[0][0], 3.0, 1e-13);
    EXPECT_NEAR(*c[1][0], 3.0, 1e-13);
}

TEST(Eoc, UndefinedAndErrors)
{
    const auto t = eoc_table({{0.1, {0.0, -1.0, 1.0}}, {0.05, {1.0, 1.0, 0.0}}});
    EXPECT_FALSE(t[0][0]);
    EXPECT_FALSE(t[0][1]);
    EXPECT_FALSE(t[0][2]);
    EXPECT_THROW(eoc_table({{0.1, {1.0}}}), std::invalid_argument);
    EXPECT_THROW(eoc_table({{0.1, {1.0}}, {0.2, {1.0}}}), std::invalid_argument);
    EXPECT_THROW(eoc_table({{0.1, {1.0}}, {0.05, {1.0, 2.0}}}), std::invalid_argument);
}

TEST(AnalysisProperty, InterpolationRatesQ2)
{
    const Field u = Field::radial_series(cos_pi_sqrt_series());
    std::vector<EocRow> rows;
    for (int n : {16, 32, 64})
    {
        const auto s = disc_space(n, ElementFamily::lagrange(2));
        const auto e = error_norms(s, interpolate_pi_E(u, s.dofs, s.E).full, u);
        rows.push_back({s.h(), {e.l2, e.h1}});
    }
    const auto t = eoc_table(rows);
    EXPECT_GT(*t[1][0], 2.8);
    EXPECT_GT(*t[1][1], 1.8);
}
