#include "cutfem/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace cutfem {

ErrorNorms error_norms(const CutSpace& space, const Eigen::VectorXd& u_full, const Field& exact,
                       const EnergyForm& energy)
{
    if (!exact)
        throw std::invalid_argument("exact solution callback missing");
    if (u_full.size() != space.num_full())
        throw std::invalid_argument("coefficient vector does not match the space");
    const int order = std::max(2, derivative_order(energy.op));
    const auto& ref = space.reference();
    ErrorNorms e;
    double l2 = 0.0, h1 = 0.0, h2 = 0.0, en = 0.0;
    Eigen::VectorXd local(ref.size());
    for (int a = 0; a < space.mesh.size(); ++a)
    {
        const auto& dofs = space.dofs.cell_dofs[a];
        for (int l = 0; l < ref.size(); ++l)
            local[l] = u_full[dofs[l]];
        CellBasis basis(ref, space.mesh.cell(a));
        const auto& vq = space.volume[a];
        for (int q = 0; q < vq.size(); ++q)
        {
            const Vec2& x = vq.points[q];
            basis.tabulate(x, order);
            auto err = [&](int i, int j) { return exact.derivative(x, i, j) - local.dot(basis.d(i, j)); };
            const double w = vq.weights[q];
            const double e0 = err(0, 0), ex = err(1, 0), ey = err(0, 1);
            const double exx = err(2, 0), exy = err(1, 1), eyy = err(0, 2);
            l2 += w * e0 * e0;
            h1 += w * (ex * ex + ey * ey);
            h2 += w * (exx * exx + 2.0 * exy * exy + eyy * eyy);
            switch (energy.op)
            {
            case VolumeOp::Value:
                en += w * e0 * e0;
                break;
            case VolumeOp::Gradient: {
                const Eigen::Vector2d g(ex, ey);
                en += w * g.dot(energy.A * g);
                break;
            }
            case VolumeOp::Laplacian:
                en += w * (exx + eyy) * (exx + eyy);
                break;
            case VolumeOp::GradLaplacian: {
                const double gx = err(3, 0) + err(1, 2), gy = err(2, 1) + err(0, 3);
                en += w * (gx * gx + gy * gy);
                break;
            }
            }
        }
    }
    e.l2 = std::sqrt(l2);
    e.h1 = std::sqrt(h1);
    e.h2 = std::sqrt(h2);
    e.energy = en;
    return e;
}

ErrorNorms combine(const ErrorNorms& a, const ErrorNorms& b)
{
    ErrorNorms c;
    c.l2 = std::hypot(a.l2, b.l2);
    c.h1 = std::hypot(a.h1, b.h1);
    c.h2 = std::hypot(a.h2, b.h2);
    c.energy = a.energy + b.energy;
    return c;
}

double broken_seminorm(const CutSpace& space, const Eigen::VectorXd& v_full, int j, CellSet cells)
{
    if (j < 0 || j > 2)
        throw std::invalid_argument("broken seminorm supports orders 0, 1, 2");
    if (v_full.size() != space.num_full())
        throw std::invalid_argument("coefficient vector does not match the space");
    const auto& ref = space.reference();
    const int n = std::min(space.family.order + 2, max_gauss_points);
    Eigen::VectorXd local(ref.size());
    double s = 0.0;
    for (int a = 0; a < space.mesh.size(); ++a)
    {
        if (cells == CellSet::Interior && !space.mesh.is_interior(a))
            continue;
        const auto& dofs = space.dofs.cell_dofs[a];
        for (int l = 0; l < ref.size(); ++l)
            local[l] = v_full[dofs[l]];
        const Cell cell = space.mesh.cell(a);
        QuadratureRule rule;
        append_square_rule(rule, cell.lo, cell.size, n);
        CellBasis basis(ref, cell);
        for (int q = 0; q < rule.size(); ++q)
        {
            basis.tabulate(rule.points[q], j);
            double v2 = 0.0;
            // multinomial weights make this the Frobenius norm of D^j
            for (int a1 = 0; a1 <= j; ++a1)
            {
                const double c = (j == 2 && a1 == 1) ? 2.0 : 1.0;
                const double d = local.dot(basis.d(a1, j - a1));
                v2 += c * d * d;
            }
            s += rule.weights[q] * v2;
        }
    }
    return std::sqrt(s);
}

std::vector<std::vector<std::optional<double>>> eoc_table(const std::vector<EocRow>& rows)
{
    if (rows.size() < 2)
        throw std::invalid_argument("need ≥ 2 levels");
    std::vector<std::vector<std::optional<double>>> out;
    for (size_t i = 0; i + 1 < rows.size(); ++i)
    {
        const auto& r0 = rows[i];
        const auto& r1 = rows[i + 1];
        if (!(r1.h < r0.h) || !(r1.h > 0.0))
            throw std::invalid_argument("mesh sizes must be positive and strictly decreasing");
        if (r0.errors.size() != r1.errors.size())
            throw std::invalid_argument("rows have different numbers of columns");
        std::vector<std::optional<double>> eoc(r0.errors.size());
        for (size_t c = 0; c < eoc.size(); ++c)
        {
            const double e0 = r0.errors[c], e1 = r1.errors[c];
            if (e0 > 0.0 && e1 > 0.0 && std::isfinite(e0) && std::isfinite(e1))
                eoc[c] = std::log(e0 / e1) / std::log(r0.h / r1.h);
        }
        out.push_back(std::move(eoc));
    }
    return out;
}

} // namespace cutfem
