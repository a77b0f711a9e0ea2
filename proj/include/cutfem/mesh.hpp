#pragma once

#include "cutfem/geometry.hpp"

#include <vector>

namespace cutfem {

/// Uniform Cartesian grid of nx * ny square cells starting at `origin`.
struct BackgroundGrid
{
    Vec2 origin;
    int nx = 1;
    int ny = 1;
    double cell_size = 1.0;

    int num_cells() const { return nx * ny; }
    int cell_index(int i, int j) const { return i + nx * j; }
    Cell cell(int index) const
    {
        return Cell{origin + cell_size * Vec2(index % nx, index / nx), cell_size};
    }
    Vec2 upper() const { return origin + cell_size * Vec2(nx, ny); }
    void validate() const;
};

enum class CellKind { Interior, Cut };

/// Cells of the background grid meeting the domain. Interior cells form the
/// stable part from which the approximation is extended.
struct ActiveMesh
{
    BackgroundGrid grid;
    std::vector<int> cells;        // grid indices, ascending
    std::vector<CellKind> kind;    // per active cell
    std::vector<CellClass> cut;    // geometric class per active cell (Inside or Cut)
    std::vector<int> active_index; // per grid cell, -1 if inactive
    int nno = 0;                   // corner nodes of active cells
    double h = 0.0;                // 1 / sqrt(nno)

    int size() const { return static_cast<int>(cells.size()); }
    Cell cell(int active) const { return grid.cell(cells[active]); }
    bool is_interior(int active) const { return kind[active] == CellKind::Interior; }
    int num_interior() const;
};

/// Donor map from every active cell to an interior cell, with the induced
/// macro-element partition.
struct ShMap
{
    std::vector<int> target;                      // per active cell, active index of an interior cell
    std::vector<std::vector<int>> macro_elements; // per interior target: cells mapped to it (ascending)
    std::vector<double> macro_diameter;           // diameter of each macro element
    double max_diameter_over_h = 0.0;             // max diameter / cell size
};

/// `large_threshold` > 0 switches to the "large intersection" split
/// |T ∩ Ω| >= large_threshold * cell_size^2.
ActiveMesh build_active_mesh(const BackgroundGrid& grid, const LevelSetDomain& domain, double large_threshold = 0.0,
                             int area_depth = 4);

ShMap build_sh_map(const ActiveMesh& active);

} // namespace cutfem
