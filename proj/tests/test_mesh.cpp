#include "cutfem/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace cutfem;

namespace {

const BackgroundGrid unit4{{0, 0}, 4, 4, 0.25};

ActiveMesh disc4() { return build_active_mesh(unit4, LevelSetDomain::circle({0.5, 0.5}, 0.5)); }

} // namespace

TEST(ActiveMesh, DiscOnFourByFour)
{
    const auto m = disc4();
    EXPECT_EQ(m.size(), 16);
    EXPECT_EQ(m.num_interior(), 4);
    std::vector<int> inner;
    for (int a = 0; a < m.size(); ++a)
        if (m.is_interior(a))
            inner.push_back(m.cells[a]);
    EXPECT_EQ(inner, (std::vector<int>{5, 6, 9, 10}));
    EXPECT_EQ(m.nno, 25);
    EXPECT_NEAR(m.h, 0.2, 1e-15);
}

TEST(ActiveMesh, Errors)
{
    EXPECT_THROW(build_active_mesh(unit4, LevelSetDomain::circle({5, 5}, 0.1)), std::invalid_argument);
    // the grid lies inside the hole
    EXPECT_THROW(build_active_mesh(unit4, LevelSetDomain::circle({0.5, 0.5}, 3.0).complement()), std::runtime_error);
    EXPECT_THROW(build_active_mesh(unit4, LevelSetDomain::circle({0.9, 0.5}, 0.3)), std::invalid_argument);
    EXPECT_THROW(build_active_mesh(BackgroundGrid{{0, 0}, 0, 4, 0.25}, LevelSetDomain::circle({0, 0}, 1)),
                 std::invalid_argument);
    EXPECT_THROW(build_active_mesh(unit4, LevelSetDomain::circle({0.5, 0.5}, 0.4), -1.0), std::invalid_argument);
}

TEST(ActiveMesh, LargeIntersectionPromotesCutCells)
{
    const auto disc = LevelSetDomain::circle({0.5, 0.5}, 0.5);
    const auto m = build_active_mesh(unit4, disc, 0.5);
    // edge-midpoint cells are more than half covered, corner cells are not
    EXPECT_EQ(m.num_interior(), 12);
    for (int a = 0; a < m.size(); ++a)
        EXPECT_EQ(m.cut[a], (m.cells[a] == 5 || m.cells[a] == 6 || m.cells[a] == 9 || m.cells[a] == 10)
                                ? CellClass::Inside
                                : CellClass::Cut);
}

TEST(ShMap, AllInteriorIsIdentity)
{
    const auto m = build_active_mesh(unit4, LevelSetDomain::half_plane({1.0, 0.0}, 10.0));
    ASSERT_EQ(m.num_interior(), 16);
    const auto sh = build_sh_map(m);
    for (int a = 0; a < m.size(); ++a)
        EXPECT_EQ(sh.target[a], a);
    EXPECT_EQ(sh.macro_elements.size(), 16u);
    EXPECT_NEAR(sh.max_diameter_over_h, std::sqrt(2.0), 1e-14);
}

TEST(ShMap, CutCellsGoToNearestInterior)
{
    const auto m = disc4();
    const auto sh = build_sh_map(m);
    // edge neighbours of the central block map to it, corners map diagonally
    EXPECT_EQ(m.cells[sh.target[m.active_index[1]]], 5);
    EXPECT_EQ(m.cells[sh.target[m.active_index[4]]], 5);
    EXPECT_EQ(m.cells[sh.target[m.active_index[0]]], 5);
    EXPECT_EQ(m.cells[sh.target[m.active_index[15]]], 10);
    EXPECT_EQ(m.cells[sh.target[m.active_index[7]]], 6);
    for (int a = 0; a < m.size(); ++a)
        EXPECT_TRUE(m.is_interior(sh.target[a]));
    // each corner macro element is the 2x2 block [0, 0.5]^2
    ASSERT_EQ(sh.macro_elements.size(), 4u);
    for (double d : sh.macro_diameter)
        EXPECT_NEAR(d, 0.5 * std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(sh.max_diameter_over_h, 2.0 * std::sqrt(2.0), 1e-14);
}

TEST(ShMap, TieGoesToLowerIndex)
{
    // hole in the middle cell of a 3 x 1 strip: both neighbours are equally far
    const BackgroundGrid strip{{0, 0}, 3, 1, 1.0};
    const auto m = build_active_mesh(strip, LevelSetDomain::circle({1.5, 0.5}, 0.3).complement());
    ASSERT_EQ(m.num_interior(), 2);
    const auto sh = build_sh_map(m);
    EXPECT_EQ(sh.target[1], 0);
}

TEST(ShMap, NoInteriorCellsIsAnError)
{
    const BackgroundGrid g{{0, 0}, 2, 2, 1.0};
    const auto m = build_active_mesh(g, LevelSetDomain::circle({1, 1}, 0.5));
    EXPECT_EQ(m.num_interior(), 0);
    EXPECT_THROW(build_sh_map(m), std::runtime_error);
}

TEST(MeshProperty, MacroElementsPartitionTheActiveMesh)
{
    for (int n : {8, 13, 32})
    {
        const BackgroundGrid g{{-1.0 / n, -1.0 / n}, n + 2, n + 2, 1.0 / n};
        const auto m = build_active_mesh(g, LevelSetDomain::circle({0.5, 0.5}, 0.5 + 1e-6));
        const auto sh = build_sh_map(m);
        std::vector<int> seen(m.size(), 0);
        for (const auto& me : sh.macro_elements)
            for (int a : me)
                ++seen[a];
        EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; })) << n;
        // donors stay within a few cells so the macro diameter is O(h)
        EXPECT_LT(sh.max_diameter_over_h, 4.0) << n;
    }
}
