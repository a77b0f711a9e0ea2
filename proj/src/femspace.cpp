#include "cutfem/femspace.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace cutfem {

ElementFamily ElementFamily::lagrange(int k)
{
    if (k < 1 || k > 2)
        throw std::invalid_argument("LagrangeQ supports k = 1, 2");
    return {FamilyKind::LagrangeQ, k};
}

ElementFamily ElementFamily::hermite(int k)
{
    if (k != 3 && k != 5)
        throw std::invalid_argument("HermiteTensor supports k = 3, 5");
    return {FamilyKind::HermiteTensor, k};
}

std::string ElementFamily::name() const
{
    return (kind == FamilyKind::LagrangeQ ? "Q" : "H") + std::to_string(order);
}

namespace {

// dual coefficients solved in extended precision, then rounded once
Basis1d<double> rounded_basis(ElementFamily family)
{
    const auto x = family.kind == FamilyKind::LagrangeQ ? lagrange_basis_1d<long double>(family.order)
                                                        : hermite_basis_1d<long double>(family.order);
    Basis1d<double> b;
    b.degree = x.degree;
    b.node.assign(x.node.begin(), x.node.end());
    b.deriv = x.deriv;
    b.coeffs = x.coeffs.cast<double>();
    return b;
}

} // namespace

ReferenceElement::ReferenceElement(ElementFamily family)
    : family_(family), basis_(rounded_basis(family)), n_(family.order + 1)
{
}

std::array<int, 2> ReferenceElement::alpha(int local) const
{
    return {basis_.deriv[axis_function(local, 0)], basis_.deriv[axis_function(local, 1)]};
}

Vec2 ReferenceElement::node(int local) const
{
    return {basis_.node[axis_function(local, 0)], basis_.node[axis_function(local, 1)]};
}

double ReferenceElement::evaluate(int local, const Vec2& t, int a, int b) const
{
    return basis_.eval(axis_function(local, 0), t.x(), a) * basis_.eval(axis_function(local, 1), t.y(), b);
}

Eigen::MatrixXd ReferenceElement::kronecker_matrix() const
{
    Eigen::MatrixXd K(size(), size());
    for (int x = 0; x < size(); ++x)
    {
        const auto al = alpha(x);
        const Vec2 xi = node(x);
        for (int y = 0; y < size(); ++y)
            K(x, y) = evaluate(y, xi, al[0], al[1]);
    }
    return K;
}

const ReferenceElement& reference_element(ElementFamily family)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, ReferenceElement> cache;
    std::lock_guard lock(mutex);
    const auto key = std::make_pair(static_cast<int>(family.kind), family.order);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, ReferenceElement(family)).first;
    return it->second;
}

double evaluate_shape(ElementFamily family, int local_dof, const Vec2& point, std::array<int, 2> deriv)
{
    const auto& ref = reference_element(family);
    if (local_dof < 0 || local_dof >= ref.size())
        throw std::out_of_range("local dof out of range");
    return ref.evaluate(local_dof, point, deriv[0], deriv[1]);
}

CellBasis::CellBasis(const ReferenceElement& ref, const Cell& cell) : ref_(&ref), cell_(cell) {}

void CellBasis::tabulate(const Vec2& x, int max_order)
{
    const auto& b = ref_->basis_1d();
    const int n = ref_->functions_per_axis();
    const double h = cell_.size;
    const Vec2 t = (x - cell_.lo) / h;
    stride_ = max_order + 1;
    vx_.resize(n, stride_);
    vy_.resize(n, stride_);
    for (int f = 0; f < n; ++f)
        for (int m = 0; m <= max_order; ++m)
        {
            const double scale = std::pow(h, b.deriv[f] - m);
            vx_(f, m) = m <= b.degree ? scale * b.eval(f, t.x(), m) : 0.0;
            vy_(f, m) = m <= b.degree ? scale * b.eval(f, t.y(), m) : 0.0;
        }
    table_.resize(stride_ * stride_);
    for (int a = 0; a <= max_order; ++a)
        for (int c = 0; a + c <= max_order; ++c)
        {
            auto& v = table_[a * stride_ + c];
            v.resize(n * n);
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix)
                    v[ix + n * iy] = vx_(ix, a) * vy_(iy, c);
        }
}

DofMap build_dof_map(const ActiveMesh& active, ElementFamily family)
{
    const auto& ref = reference_element(family);
    const auto& grid = active.grid;
    const int r = family.lattice_steps();
    const int nd = family.derivatives_per_node();
    const int lx = r * grid.nx + 1, ly = r * grid.ny + 1;
    std::vector<int> index(static_cast<std::size_t>(lx) * ly * nd * nd, -1);
    const double step = grid.cell_size / r;

    DofMap dofs;
    dofs.cell_dofs.resize(active.size());
    for (int a = 0; a < active.size(); ++a)
    {
        const int c = active.cells[a];
        const int ci = c % grid.nx, cj = c / grid.nx;
        auto& local = dofs.cell_dofs[a];
        local.resize(ref.size());
        for (int l = 0; l < ref.size(); ++l)
        {
            const Vec2 t = ref.node(l);
            const auto al = ref.alpha(l);
            const int px = r * ci + static_cast<int>(std::lround(t.x() * r));
            const int py = r * cj + static_cast<int>(std::lround(t.y() * r));
            const std::size_t key = ((static_cast<std::size_t>(py) * lx + px) * nd + al[1]) * nd + al[0];
            if (index[key] < 0)
            {
                index[key] = dofs.size();
                dofs.nodes.push_back({al, grid.origin + step * Vec2(px, py)});
                dofs.node_cells.emplace_back();
            }
            local[l] = index[key];
            dofs.node_cells[index[key]].push_back(a);
        }
    }

    dofs.reduced_index.assign(dofs.size(), -1);
    std::vector<char> touched(dofs.size(), 0);
    for (int a = 0; a < active.size(); ++a)
        if (active.is_interior(a))
            for (int g : dofs.cell_dofs[a])
                touched[g] = 1;
    for (int g = 0; g < dofs.size(); ++g)
    {
        if (touched[g])
        {
            dofs.reduced_index[g] = dofs.num_reduced();
            dofs.interior_dofs.push_back(g);
        }
        else
            dofs.band_dofs.push_back(g);
    }
    return dofs;
}

Eigen::VectorXd nodal_values(const DofMap& dofs, const Field& u)
{
    Eigen::VectorXd v(dofs.size());
    for (int g = 0; g < dofs.size(); ++g)
        v[g] = u.derivative(dofs.nodes[g].xi, dofs.nodes[g].alpha[0], dofs.nodes[g].alpha[1]);
    return v;
}

} // namespace cutfem
