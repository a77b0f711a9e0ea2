#include "cutfem/extension.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace cutfem {

void AveragingRule::validate(const DofMap& dofs, double tol) const
{
    if (static_cast<int>(weights.size()) != dofs.size())
        throw std::invalid_argument("averaging rule size does not match the dof map");
    for (int g : dofs.band_dofs)
    {
        double sum = 0.0;
        for (const auto& [cell, w] : weights[g])
        {
            if (w < 0.0)
                throw std::invalid_argument("averaging weights must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::invalid_argument("averaging weights must sum to one");
    }
}

AveragingRule single_element_rule(const ActiveMesh& active, const ShMap& sh, const DofMap& dofs)
{
    AveragingRule rule;
    rule.weights.resize(dofs.size());
    for (int g : dofs.band_dofs)
    {
        const Vec2& xi = dofs.nodes[g].xi;
        double best = std::numeric_limits<double>::infinity();
        int best_cell = -1;
        for (int a : dofs.node_cells[g])
        {
            const double d = (active.cell(sh.target[a]).center() - xi).squaredNorm();
            if (d < best || (d == best && a < best_cell))
            {
                best = d;
                best_cell = a;
            }
        }
        rule.weights[g] = {{best_cell, 1.0}};
    }
    return rule;
}

AveragingRule uniform_rule(const DofMap& dofs)
{
    AveragingRule rule;
    rule.weights.resize(dofs.size());
    for (int g : dofs.band_dofs)
    {
        const double w = 1.0 / static_cast<double>(dofs.node_cells[g].size());
        for (int a : dofs.node_cells[g])
            rule.weights[g].emplace_back(a, w);
    }
    return rule;
}

ExtensionOperator build_extension(const ActiveMesh& active, const ShMap& sh, const DofMap& dofs,
                                  ElementFamily family, const AveragingRule& rule)
{
    rule.validate(dofs);
    const auto& ref = reference_element(family);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(dofs.num_reduced() + dofs.band_dofs.size() * ref.size());
    for (int g : dofs.interior_dofs)
        triplets.emplace_back(g, dofs.reduced_index[g], 1.0);

    for (int g : dofs.band_dofs)
    {
        const auto& node = dofs.nodes[g];
        const int order = node.alpha[0] + node.alpha[1];
        std::map<int, double> row;
        for (const auto& [cell, kappa] : rule.weights[g])
        {
            if (kappa == 0.0)
                continue;
            if (cell < 0 || cell >= active.size())
                throw std::logic_error("averaging rule references an inactive cell");
            const int donor = sh.target[cell];
            if (donor < 0 || !active.is_interior(donor))
                throw std::logic_error("donor map does not target an interior cell");
            CellBasis basis(ref, active.cell(donor));
            basis.tabulate(node.xi, order);
            const auto& values = basis.d(node.alpha[0], node.alpha[1]);
            const auto& donor_dofs = dofs.cell_dofs[donor];
            for (int l = 0; l < ref.size(); ++l)
            {
                const int col = dofs.reduced_index[donor_dofs[l]];
                if (col < 0)
                    throw std::logic_error("donor cell owns a band dof");
                row[col] += kappa * values[l];
            }
        }
        for (const auto& [col, value] : row)
            if (value != 0.0)
                triplets.emplace_back(g, col, value);
    }

    ExtensionOperator E;
    E.matrix.resize(dofs.size(), dofs.num_reduced());
    E.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return E;
}

Eigen::VectorXd apply_expand(const ExtensionOperator& E, const Eigen::VectorXd& reduced)
{
    if (reduced.size() != E.cols())
        throw std::invalid_argument("reduced vector has the wrong dimension");
    return multiply(E.matrix, reduced);
}

Eigen::VectorXd restrict(const ExtensionOperator& E, const Eigen::VectorXd& full)
{
    if (full.size() != E.rows())
        throw std::invalid_argument("full vector has the wrong dimension");
    return E.matrix.transpose() * full;
}

Interpolant interpolate_pi_E(const Field& u, const DofMap& dofs, const ExtensionOperator& E)
{
    Interpolant pi;
    pi.reduced.resize(dofs.num_reduced());
    for (int r = 0; r < dofs.num_reduced(); ++r)
    {
        const auto& node = dofs.nodes[dofs.interior_dofs[r]];
        pi.reduced[r] = u.derivative(node.xi, node.alpha[0], node.alpha[1]);
    }
    pi.full = apply_expand(E, pi.reduced);
    return pi;
}

} // namespace cutfem
