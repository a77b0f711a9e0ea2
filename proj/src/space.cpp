#include "cutfem/space.hpp"

#include <algorithm>

namespace cutfem {

CutSpace make_cut_space(const BackgroundGrid& grid, const LevelSetDomain& domain, ElementFamily family,
                        const SpaceOptions& options)
{
    const int k = family.order;
    const int depth = options.depth >= 0 ? options.depth : (k <= 2 ? 4 : 6);
    const int vg = options.volume_gauss > 0 ? options.volume_gauss : std::min(k + 2, max_gauss_points);
    // integrands along arcs are trigonometric in the parameter
    const bool curved = std::holds_alternative<Circle>(domain.shape());
    const int sg = options.surface_gauss > 0 ? options.surface_gauss
                                             : (curved ? max_gauss_points : std::min(k + 2, max_gauss_points));

    ActiveMesh mesh = build_active_mesh(grid, domain, options.large_threshold);
    ShMap sh = build_sh_map(mesh);
    DofMap dofs = build_dof_map(mesh, family);
    const AveragingRule rule =
        options.averaging == AveragingKind::Uniform ? uniform_rule(dofs) : single_element_rule(mesh, sh, dofs);
    ExtensionOperator E = build_extension(mesh, sh, dofs, family, rule);

    CutSpace space{domain, family, std::move(mesh), std::move(sh), std::move(dofs), std::move(E), {}, {}, depth};
    const int n = space.mesh.size();
    space.volume.resize(n);
    space.boundary.resize(n);
    const bool straight = domain.is_convex_polygon();
    for (int a = 0; a < n; ++a)
    {
        const Cell cell = space.mesh.cell(a);
        space.volume[a] = volume_quadrature(cell, domain, vg, depth);
        // a straight boundary may run along the edge of an uncut cell
        if (space.mesh.cut[a] == CellClass::Cut || straight)
            space.boundary[a] = surface_quadrature(cell, domain, sg);
    }
    return space;
}

double evaluate_function(const CutSpace& space, const Eigen::VectorXd& full, int cell, const Vec2& x, int a, int b)
{
    CellBasis basis(space.reference(), space.mesh.cell(cell));
    basis.tabulate(x, a + b);
    const auto& d = basis.d(a, b);
    const auto& local = space.dofs.cell_dofs[cell];
    double s = 0.0;
    for (int l = 0; l < basis.size(); ++l)
        s += full[local[l]] * d[l];
    return s;
}

} // namespace cutfem
