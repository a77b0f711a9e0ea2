#pragma once

#include "cutfem/fields.hpp"
#include "cutfem/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutfem {

enum class FamilyKind { LagrangeQ, HermiteTensor };

/// Tensor-product element family: C^0 Lagrange Q1/Q2 or C^{(k-1)/2} Hermite splines of odd order k.
struct ElementFamily
{
    FamilyKind kind = FamilyKind::LagrangeQ;
    int order = 1;

    static ElementFamily lagrange(int k);
    static ElementFamily hermite(int k);

    int dofs_per_axis() const { return order + 1; }
    int dofs_per_cell() const { return (order + 1) * (order + 1); }
    /// l such that the global space is C^l
    int continuity() const { return kind == FamilyKind::LagrangeQ ? 0 : (order - 1) / 2; }
    int derivatives_per_node() const { return kind == FamilyKind::LagrangeQ ? 1 : (order + 1) / 2; }
    /// lattice subdivisions per cell edge for node positions
    int lattice_steps() const { return kind == FamilyKind::LagrangeQ ? order : 1; }
    std::string name() const;

    bool operator==(const ElementFamily&) const = default;
};

/// 1D reference basis on [0, 1]: function f is dual to the functional
/// v -> v^(deriv[f])(node[f]); coefficients are monomial, column per function.
template <typename Scalar>
struct Basis1d
{
    int degree = 0;
    std::vector<Scalar> node;
    std::vector<int> deriv;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coeffs;

    int size() const { return degree + 1; }

    /// m-th derivative of function f at t (any t, the polynomial is extended canonically)
    Scalar eval(int f, Scalar t, int m) const
    {
        Scalar r = 0;
        for (int i = degree; i >= m; --i)
        {
            Scalar ff = 1;
            for (int q = 0; q < m; ++q)
                ff *= Scalar(i - q);
            r = r * t + coeffs(i, f) * ff;
        }
        return r;
    }
};

namespace detail {

template <typename Scalar>
void solve_dual_system(Basis1d<Scalar>& b)
{
    const int n = b.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> V(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
        {
            // functional j applied to monomial t^i
            const int m = b.deriv[j];
            if (i < m)
            {
                V(j, i) = 0;
                continue;
            }
            Scalar ff = 1;
            for (int q = 0; q < m; ++q)
                ff *= Scalar(i - q);
            V(j, i) = ff * std::pow(b.node[j], i - m);
        }
    b.coeffs = V.fullPivLu().solve(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n));
}

} // namespace detail

template <typename Scalar>
Basis1d<Scalar> lagrange_basis_1d(int k)
{
    if (k < 1 || k > 2)
        throw std::invalid_argument("Lagrange Q_k supported for k = 1, 2");
    Basis1d<Scalar> b;
    b.degree = k;
    for (int p = 0; p <= k; ++p)
    {
        b.node.push_back(Scalar(p) / Scalar(k));
        b.deriv.push_back(0);
    }
    detail::solve_dual_system(b);
    return b;
}

/// Odd-order Hermite basis with derivatives 0..(k-1)/2 at each endpoint;
/// function index = endpoint * (k+1)/2 + derivative order.
template <typename Scalar>
Basis1d<Scalar> hermite_basis_1d(int k)
{
    if (k < 1 || k % 2 == 0 || k > 5)
        throw std::invalid_argument("Hermite splines supported for k = 1, 3, 5");
    Basis1d<Scalar> b;
    b.degree = k;
    const int nd = (k + 1) / 2;
    for (int e = 0; e < 2; ++e)
        for (int l = 0; l < nd; ++l)
        {
            b.node.push_back(Scalar(e));
            b.deriv.push_back(l);
        }
    detail::solve_dual_system(b);
    return b;
}

/// Tensor-product reference element on [0, 1]^2; local dof = ix + n * iy.
class ReferenceElement
{
public:
    explicit ReferenceElement(ElementFamily family);

    const ElementFamily& family() const { return family_; }
    const Basis1d<double>& basis_1d() const { return basis_; }
    int size() const { return n_ * n_; }
    int functions_per_axis() const { return n_; }
    int axis_function(int local, int axis) const { return axis == 0 ? local % n_ : local / n_; }
    std::array<int, 2> alpha(int local) const;
    Vec2 node(int local) const;

    /// d^a/dx^a d^b/dy^b of reference shape function `local` at reference point t.
    double evaluate(int local, const Vec2& t, int a, int b) const;

    /// Matrix of functionals applied to shape functions; identity for a valid dual basis.
    Eigen::MatrixXd kronecker_matrix() const;

private:
    ElementFamily family_;
    Basis1d<double> basis_;
    int n_;
};

const ReferenceElement& reference_element(ElementFamily family);

/// Reference-cell evaluation used by tests: basis function `local_dof` of `family`
/// (with reference units) at any point of the plane.
double evaluate_shape(ElementFamily family, int local_dof, const Vec2& point, std::array<int, 2> deriv);

/// Physical shape functions of one cell. Hermite derivative dofs are in physical
/// units, so basis function l scales as h^{|alpha_l|}.
class CellBasis
{
public:
    CellBasis(const ReferenceElement& ref, const Cell& cell);

    /// Tabulate all derivatives with a + b <= max_order at x.
    void tabulate(const Vec2& x, int max_order);
    const Eigen::VectorXd& d(int a, int b) const { return table_[a * stride_ + b]; }
    int size() const { return ref_->size(); }

private:
    const ReferenceElement* ref_;
    Cell cell_;
    int stride_ = 0;
    Eigen::MatrixXd vx_, vy_;
    std::vector<Eigen::VectorXd> table_;
};

struct GeneralizedNode
{
    std::array<int, 2> alpha;
    Vec2 xi;
};

/// Conforming global numbering over the active mesh.
struct DofMap
{
    std::vector<GeneralizedNode> nodes;
    std::vector<std::vector<int>> cell_dofs;  // per active cell, by local dof
    std::vector<std::vector<int>> node_cells; // per dof: active cells whose closure holds xi
    std::vector<int> interior_dofs;           // ascending; touched by an interior cell
    std::vector<int> band_dofs;               // ascending; the rest
    std::vector<int> reduced_index;           // per dof: position in interior_dofs or -1

    int size() const { return static_cast<int>(nodes.size()); }
    int num_reduced() const { return static_cast<int>(interior_dofs.size()); }
    bool is_interior(int dof) const { return reduced_index[dof] >= 0; }
};

DofMap build_dof_map(const ActiveMesh& active, ElementFamily family);

/// Apply the nodal functionals D^alpha u(xi) to every dof.
Eigen::VectorXd nodal_values(const DofMap& dofs, const Field& u);

} // namespace cutfem
