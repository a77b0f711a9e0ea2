#include "cutfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace cutfem {

void BackgroundGrid::validate() const
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("grid needs at least one cell per direction");
    if (!(cell_size > 0.0))
        throw std::invalid_argument("grid cell size must be positive");
}

int ActiveMesh::num_interior() const
{
    return static_cast<int>(std::count(kind.begin(), kind.end(), CellKind::Interior));
}

ActiveMesh build_active_mesh(const BackgroundGrid& grid, const LevelSetDomain& domain, double large_threshold,
                             int area_depth)
{
    grid.validate();
    if (large_threshold < 0.0)
        throw std::invalid_argument("large-intersection threshold must be nonnegative");
    if (const auto box = domain.bounding_box())
    {
        const Vec2 lo = grid.origin, hi = grid.upper();
        if ((box->min().array() < lo.array()).any() || (box->max().array() > hi.array()).any())
            throw std::invalid_argument("domain extends outside the background grid");
    }

    ActiveMesh mesh;
    mesh.grid = grid;
    mesh.active_index.assign(grid.num_cells(), -1);
    const double cell_area = grid.cell_size * grid.cell_size;
    for (int c = 0; c < grid.num_cells(); ++c)
    {
        const Cell cell = grid.cell(c);
        const CellClass cls = classify_cell(cell, domain);
        if (cls == CellClass::Outside)
            continue;
        CellKind kind = cls == CellClass::Inside ? CellKind::Interior : CellKind::Cut;
        if (large_threshold > 0.0 && cls == CellClass::Cut &&
            cut_area(cell, domain, area_depth) >= large_threshold * cell_area)
            kind = CellKind::Interior;
        mesh.active_index[c] = mesh.size();
        mesh.cells.push_back(c);
        mesh.kind.push_back(kind);
        mesh.cut.push_back(cls);
    }
    if (mesh.cells.empty())
        throw std::runtime_error("domain does not meet grid");

    std::set<int> corners;
    for (int c : mesh.cells)
    {
        const int i = c % grid.nx, j = c / grid.nx;
        for (int k = 0; k < 4; ++k)
            corners.insert((i + (k & 1)) + (grid.nx + 1) * (j + (k >> 1)));
    }
    mesh.nno = static_cast<int>(corners.size());
    mesh.h = 1.0 / std::sqrt(static_cast<double>(mesh.nno));
    return mesh;
}

ShMap build_sh_map(const ActiveMesh& active)
{
    std::vector<int> interior;
    for (int a = 0; a < active.size(); ++a)
        if (active.is_interior(a))
            interior.push_back(a);
    if (interior.empty())
        throw std::runtime_error("mesh too coarse for extension: no interior cells");

    ShMap sh;
    sh.target.resize(active.size());
    for (int a = 0; a < active.size(); ++a)
    {
        if (active.is_interior(a))
        {
            sh.target[a] = a;
            continue;
        }
        const Vec2 c = active.cell(a).center();
        double best = std::numeric_limits<double>::infinity();
        int best_cell = -1;
        // interior cells are visited in ascending index order, so strict < keeps the lowest index on ties
        for (int b : interior)
        {
            const double d = (active.cell(b).center() - c).squaredNorm();
            if (d < best)
            {
                best = d;
                best_cell = b;
            }
        }
        sh.target[a] = best_cell;
    }

    std::map<int, std::vector<int>> groups;
    for (int a = 0; a < active.size(); ++a)
        groups[sh.target[a]].push_back(a);
    const double size = active.grid.cell_size;
    for (auto& [target, members] : groups)
    {
        double diam = 0.0;
        for (std::size_t p = 0; p < members.size(); ++p)
            for (std::size_t q = p; q < members.size(); ++q)
                for (int k = 0; k < 4; ++k)
                    for (int l = 0; l < 4; ++l)
                        diam = std::max(diam, (active.cell(members[p]).corner(k) - active.cell(members[q]).corner(l)).norm());
        sh.macro_elements.push_back(std::move(members));
        sh.macro_diameter.push_back(diam);
        sh.max_diameter_over_h = std::max(sh.max_diameter_over_h, diam / size);
    }
    return sh;
}

} // namespace cutfem
