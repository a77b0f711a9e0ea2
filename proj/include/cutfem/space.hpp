#pragma once

#include "cutfem/extension.hpp"

#include <vector>

namespace cutfem {

enum class AveragingKind { SingleElement, Uniform };

struct SpaceOptions
{
    double large_threshold = 0.0;
    /// quadtree depth for curved cut cells; negative selects 4 for k <= 2 and 6 otherwise
    int depth = -1;
    /// Gauss points per direction; negative selects k + 2 (arcs get the full table)
    int volume_gauss = -1;
    int surface_gauss = -1;
    AveragingKind averaging = AveragingKind::SingleElement;
};

/// Everything attached to one (grid, domain, element family) triple: active
/// mesh, donor map, dofs, extension operator and cached cut quadrature.
struct CutSpace
{
    LevelSetDomain domain;
    ElementFamily family;
    ActiveMesh mesh;
    ShMap sh;
    DofMap dofs;
    ExtensionOperator E;
    std::vector<QuadratureRule> volume;   // per active cell, on T ∩ Ω
    std::vector<QuadratureRule> boundary; // per active cell, on T ∩ ∂Ω
    int depth = 0;

    double h() const { return mesh.h; }
    int num_full() const { return dofs.size(); }
    int num_reduced() const { return dofs.num_reduced(); }
    const ReferenceElement& reference() const { return reference_element(family); }
};

CutSpace make_cut_space(const BackgroundGrid& grid, const LevelSetDomain& domain, ElementFamily family,
                        const SpaceOptions& options = {});

/// Value of sum_l coeffs[dofs(l)] D^{a,b} phi_l at x, using the basis of active cell `cell`.
double evaluate_function(const CutSpace& space, const Eigen::VectorXd& full, int cell, const Vec2& x, int a, int b);

} // namespace cutfem
