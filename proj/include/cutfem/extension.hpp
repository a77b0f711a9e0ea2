#pragma once

#include "cutfem/femspace.hpp"
#include "cutfem/solver.hpp"

#include <utility>
#include <vector>

namespace cutfem {

/// Convex weights kappa_{T,x} over T_h(x) for every band dof x (empty for interior dofs).
struct AveragingRule
{
    std::vector<std::vector<std::pair<int, double>>> weights;

    /// Throws unless every band dof has nonnegative weights summing to one.
    void validate(const DofMap& dofs, double tol = 1e-12) const;
};

/// Weight one on the cell of T_h(x) whose donor centroid is nearest to xi.
AveragingRule single_element_rule(const ActiveMesh& active, const ShMap& sh, const DofMap& dofs);

/// Equal weights over all of T_h(x).
AveragingRule uniform_rule(const DofMap& dofs);

/// Sparse map from interior (reduced) coefficients to all active coefficients.
struct ExtensionOperator
{
    SparseMatrix matrix; // rows: all dofs, cols: interior_dofs order

    int rows() const { return static_cast<int>(matrix.rows()); }
    int cols() const { return static_cast<int>(matrix.cols()); }
};

/// Row of a band dof x = (alpha, xi): sum over weighted cells T of D^alpha of the
/// canonical extension of the shape functions of S_h(T), evaluated at xi.
ExtensionOperator build_extension(const ActiveMesh& active, const ShMap& sh, const DofMap& dofs,
                                  ElementFamily family, const AveragingRule& rule);

Eigen::VectorXd apply_expand(const ExtensionOperator& E, const Eigen::VectorXd& reduced);
Eigen::VectorXd restrict(const ExtensionOperator& E, const Eigen::VectorXd& full);

struct Interpolant
{
    Eigen::VectorXd reduced;
    Eigen::VectorXd full;
};

/// Nodal interpolation on the interior dofs followed by extension.
Interpolant interpolate_pi_E(const Field& u, const DofMap& dofs, const ExtensionOperator& E);

} // namespace cutfem
