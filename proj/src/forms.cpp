#include "cutfem/forms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace cutfem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// D(a, b) returns a derivative (vector over local dofs, or a scalar).
template<class D>
auto apply_trace(TraceOp op, const Vec2& n, D&& d)
{
    using R = std::decay_t<decltype(d(0, 0))>;
    switch (op)
    {
    case TraceOp::Value:
        return R(d(0, 0));
    case TraceOp::Normal:
        return R(n.x() * d(1, 0) + n.y() * d(0, 1));
    case TraceOp::Laplacian:
        return R(d(2, 0) + d(0, 2));
    case TraceOp::NormalLaplacian:
        return R(n.x() * (d(3, 0) + d(1, 2)) + n.y() * (d(2, 1) + d(0, 3)));
    case TraceOp::Bilaplacian:
        return R(d(4, 0) + 2.0 * d(2, 2) + d(0, 4));
    case TraceOp::NormalBilaplacian:
        return R(n.x() * (d(5, 0) + 2.0 * d(3, 2) + d(1, 4)) + n.y() * (d(4, 1) + 2.0 * d(2, 3) + d(0, 5)));
    }
    throw std::logic_error("unknown trace operator");
}

// components c_j with a_Omega(v, w) = sum_j c_j(v) c_j(w)
template<class D>
auto volume_components(VolumeOp op, D&& d)
{
    using R = std::decay_t<decltype(d(0, 0))>;
    std::vector<R> c;
    switch (op)
    {
    case VolumeOp::Value:
        c.emplace_back(d(0, 0));
        break;
    case VolumeOp::Gradient:
        c.emplace_back(d(1, 0));
        c.emplace_back(d(0, 1));
        break;
    case VolumeOp::Laplacian:
        c.emplace_back(d(2, 0) + d(0, 2));
        break;
    case VolumeOp::GradLaplacian:
        c.emplace_back(d(3, 0) + d(1, 2));
        c.emplace_back(d(2, 1) + d(0, 3));
        break;
    }
    return c;
}

void scatter(Triplets& t, const std::vector<int>& rows, const std::vector<int>& cols, const Eigen::MatrixXd& local,
             int row_offset = 0, int col_offset = 0)
{
    for (int i = 0; i < local.rows(); ++i)
        for (int j = 0; j < local.cols(); ++j)
            if (local(i, j) != 0.0)
                t.emplace_back(rows[i] + row_offset, cols[j] + col_offset, local(i, j));
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& t)
{
    SparseMatrix K(rows, cols);
    K.setFromTriplets(t.begin(), t.end());
    K.makeCompressed();
    return K;
}

void check_params(const FormParams& params)
{
    if (!(params.beta > 0.0))
        throw std::invalid_argument("penalty parameter beta must be positive");
}

void check_spd(const Eigen::Matrix2d& A, const char* name)
{
    const bool symmetric = std::abs(A(0, 1) - A(1, 0)) <= 1e-14 * A.cwiseAbs().maxCoeff();
    if (!symmetric || !A.allFinite())
        throw std::invalid_argument(std::string("diffusion matrix ") + name + " is not symmetric positive definite");
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(A).eigenvalues();
    if (!(ev.minCoeff() > 0.0))
        throw std::invalid_argument(std::string("diffusion matrix ") + name + " is not symmetric positive definite");
}

bool on_grid_boundary(const BackgroundGrid& grid, const Vec2& x)
{
    const double tol = 1e-12 * std::max(1.0, grid.cell_size * std::max(grid.nx, grid.ny));
    const Vec2 hi = grid.upper();
    return std::abs(x.x() - grid.origin.x()) < tol || std::abs(x.x() - hi.x()) < tol ||
           std::abs(x.y() - grid.origin.y()) < tol || std::abs(x.y() - hi.y()) < tol;
}

} // namespace

int derivative_order(VolumeOp op)
{
    switch (op)
    {
    case VolumeOp::Value: return 0;
    case VolumeOp::Gradient: return 1;
    case VolumeOp::Laplacian: return 2;
    case VolumeOp::GradLaplacian: return 3;
    }
    return 0;
}

int derivative_order(TraceOp op)
{
    return static_cast<int>(op);
}

NitscheForm poisson_form()
{
    NitscheForm form;
    form.volume = VolumeOp::Gradient;
    form.consistency = {{1.0, TraceOp::Normal, TraceOp::Value}};
    form.penalty = {{1.0, 1, TraceOp::Value}};
    form.min_continuity = 0;
    form.name = "poisson";
    return form;
}

NitscheForm biharmonic_form(double gamma)
{
    if (!(gamma > 0.0))
        throw std::invalid_argument("penalty parameter gamma must be positive");
    NitscheForm form;
    form.volume = VolumeOp::Laplacian;
    // (D^2 u, v) = (Lu, Lv) - [(Lu, dn v) - (dn Lu, v)]
    form.consistency = {{1.0, TraceOp::Laplacian, TraceOp::Normal}, {-1.0, TraceOp::NormalLaplacian, TraceOp::Value}};
    form.penalty = {{1.0, 1, TraceOp::Normal}, {gamma, 3, TraceOp::Value}};
    form.min_continuity = 1;
    form.name = "biharmonic";
    return form;
}

NitscheForm triharmonic_form()
{
    NitscheForm form;
    form.volume = VolumeOp::GradLaplacian;
    // (-L^3 u, v) = (grad Lu, grad Lv) - [(dn L^2 u, v) - (L^2 u, dn v) + (dn Lu, Lv)]
    form.consistency = {{1.0, TraceOp::NormalBilaplacian, TraceOp::Value},
                        {-1.0, TraceOp::Bilaplacian, TraceOp::Normal},
                        {1.0, TraceOp::NormalLaplacian, TraceOp::Laplacian}};
    form.penalty = {{1.0, 1, TraceOp::Laplacian}, {1.0, 3, TraceOp::Normal}, {1.0, 5, TraceOp::Value}};
    form.min_continuity = 2;
    form.name = "triharmonic";
    return form;
}

namespace {

AssembledSystem assemble_nitsche_impl(const CutSpace& space, const NitscheForm& form, const FormParams& params,
                                      const Field& f, const Field& g, bool with_matrix)
{
    check_params(params);
    if (space.family.continuity() < form.min_continuity)
        throw std::invalid_argument(form.name + " requires C" + (form.min_continuity == 1 ? "¹" : "²"));
    if (!f || (!g && !form.consistency.empty()))
        throw std::invalid_argument("missing load or boundary data");

    const int vol_order = derivative_order(form.volume);
    int bnd_order = 0;
    for (const auto& c : form.consistency)
        bnd_order = std::max({bnd_order, derivative_order(c.left), derivative_order(c.right)});
    for (const auto& p : form.penalty)
        bnd_order = std::max(bnd_order, derivative_order(p.op));

    const double h = space.h();
    const auto& ref = space.reference();
    const int nloc = ref.size();
    const int N = space.num_full();

    Triplets t;
    if (with_matrix)
        t.reserve(static_cast<size_t>(space.mesh.size()) * nloc * nloc);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    Eigen::MatrixXd K_loc(nloc, nloc);
    Eigen::VectorXd b_loc(nloc);

    for (int a = 0; a < space.mesh.size(); ++a)
    {
        CellBasis basis(ref, space.mesh.cell(a));
        auto d = [&](int i, int j) -> const Eigen::VectorXd& { return basis.d(i, j); };
        K_loc.setZero();
        b_loc.setZero();

        const auto& vq = space.volume[a];
        for (int q = 0; q < vq.size(); ++q)
        {
            const Vec2& x = vq.points[q];
            const double w = vq.weights[q];
            basis.tabulate(x, with_matrix ? vol_order : 0);
            if (with_matrix)
                for (const auto& c : volume_components(form.volume, d))
                    K_loc.noalias() += w * c * c.transpose();
            b_loc.noalias() += (w * f(x)) * basis.d(0, 0);
        }

        const auto& sq = space.boundary[a];
        for (int q = 0; q < sq.size(); ++q)
        {
            const Vec2& x = sq.points[q];
            const Vec2& n = sq.normals[q];
            const double w = sq.weights[q];
            basis.tabulate(x, bnd_order);
            auto gd = [&](int i, int j) { return g.derivative(x, i, j); };
            for (const auto& c : form.consistency)
            {
                const Eigen::VectorXd L = apply_trace(c.left, n, d);
                const Eigen::VectorXd R = apply_trace(c.right, n, d);
                if (with_matrix)
                    K_loc.noalias() -= (w * c.sign) * (R * L.transpose() + L * R.transpose());
                b_loc.noalias() -= (w * c.sign * apply_trace(c.right, n, gd)) * L;
            }
            for (const auto& p : form.penalty)
            {
                const double s = w * params.beta * p.weight * std::pow(h, -p.h_power);
                const Eigen::VectorXd P = apply_trace(p.op, n, d);
                if (with_matrix)
                    K_loc.noalias() += s * P * P.transpose();
                b_loc.noalias() += (s * apply_trace(p.op, n, gd)) * P;
            }
        }

        const auto& dofs = space.dofs.cell_dofs[a];
        if (with_matrix)
            scatter(t, dofs, dofs, K_loc);
        for (int l = 0; l < nloc; ++l)
            b[dofs[l]] += b_loc[l];
    }

    AssembledSystem sys;
    if (with_matrix)
        sys.K = from_triplets(N, N, t);
    sys.b = std::move(b);
    sys.coordinates = Coordinates::Full;
    return sys;
}

} // namespace

AssembledSystem assemble_nitsche_full(const CutSpace& space, const NitscheForm& form, const FormParams& params,
                                      const Field& f, const Field& g)
{
    return assemble_nitsche_impl(space, form, params, f, g, true);
}

Eigen::VectorXd assemble_nitsche_rhs_full(const CutSpace& space, const NitscheForm& form, const FormParams& params,
                                          const Field& f, const Field& g)
{
    return assemble_nitsche_impl(space, form, params, f, g, false).b;
}

SparseMatrix reduce(const SparseMatrix& K, const ExtensionOperator& E)
{
    if (K.rows() != E.rows() || K.cols() != E.rows())
        throw std::invalid_argument("matrix does not match the extension operator");
    const SparseMatrix Et = E.matrix.transpose();
    SparseMatrix KE = K * E.matrix;
    SparseMatrix R = Et * KE;
    R.makeCompressed();
    return R;
}

AssembledSystem reduce(const AssembledSystem& full, const ExtensionOperator& E)
{
    if (full.coordinates != Coordinates::Full)
        throw std::invalid_argument("system is already reduced");
    AssembledSystem r;
    r.K = reduce(full.K, E);
    r.b = restrict(E, full.b);
    r.coordinates = Coordinates::Reduced;
    return r;
}

AssembledSystem assemble_poisson(const CutSpace& space, const FormParams& params, const Field& f, const Field& g)
{
    return reduce(assemble_nitsche_full(space, poisson_form(), params, f, g), space.E);
}

AssembledSystem assemble_biharmonic(const CutSpace& space, const FormParams& params, const Field& f, const Field& g)
{
    if (space.family.continuity() < 1)
        throw std::invalid_argument("biharmonic requires C¹");
    return reduce(assemble_nitsche_full(space, biharmonic_form(params.gamma), params, f, g), space.E);
}

AssembledSystem assemble_triharmonic(const CutSpace& space, const FormParams& params, const Field& f,
                                     const Field& g)
{
    if (space.family.kind != FamilyKind::HermiteTensor || space.family.order != 5)
        throw std::invalid_argument("triharmonic requires C² (Hermite k = 5)");
    return reduce(assemble_nitsche_full(space, triharmonic_form(), params, f, g), space.E);
}

SparseMatrix assemble_mass_full(const CutSpace& space)
{
    const auto& ref = space.reference();
    const int nloc = ref.size();
    Triplets t;
    t.reserve(static_cast<size_t>(space.mesh.size()) * nloc * nloc);
    Eigen::MatrixXd M_loc(nloc, nloc);
    for (int a = 0; a < space.mesh.size(); ++a)
    {
        CellBasis basis(ref, space.mesh.cell(a));
        M_loc.setZero();
        const auto& vq = space.volume[a];
        for (int q = 0; q < vq.size(); ++q)
        {
            basis.tabulate(vq.points[q], 0);
            const auto& v = basis.d(0, 0);
            M_loc.noalias() += vq.weights[q] * v * v.transpose();
        }
        scatter(t, space.dofs.cell_dofs[a], space.dofs.cell_dofs[a], M_loc);
    }
    return from_triplets(space.num_full(), space.num_full(), t);
}

SparseMatrix assemble_mass(const CutSpace& space)
{
    return reduce(assemble_mass_full(space), space.E);
}

Eigen::VectorXd assemble_load_full(const CutSpace& space, const Field& f)
{
    const auto& ref = space.reference();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_full());
    for (int a = 0; a < space.mesh.size(); ++a)
    {
        CellBasis basis(ref, space.mesh.cell(a));
        const auto& vq = space.volume[a];
        const auto& dofs = space.dofs.cell_dofs[a];
        for (int q = 0; q < vq.size(); ++q)
        {
            basis.tabulate(vq.points[q], 0);
            const double s = vq.weights[q] * f(vq.points[q]);
            const auto& v = basis.d(0, 0);
            for (int l = 0; l < ref.size(); ++l)
                b[dofs[l]] += s * v[l];
        }
    }
    return b;
}

double interface_kappa(const CutSpace& phase1, int cell, const FormParams& params)
{
    if (params.kappa == KappaRule::Fixed)
    {
        if (!(params.kappa1 > 0.0 && params.kappa1 < 1.0))
            throw std::invalid_argument("fixed interface weight must lie in (0, 1)");
        return params.kappa1;
    }
    const double cs = phase1.mesh.grid.cell_size;
    return std::clamp(phase1.volume[cell].total_weight() / (cs * cs), 0.0, 1.0);
}

double interface_h(const CutSpace& phase1, const CutSpace& phase2)
{
    const auto& grid = phase1.mesh.grid;
    std::vector<char> used(static_cast<size_t>(grid.nx + 1) * (grid.ny + 1), 0);
    for (const CutSpace* s : {&phase1, &phase2})
        for (int c : s->mesh.cells)
        {
            const int i = c % grid.nx, j = c / grid.nx;
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di)
                    used[(i + di) + static_cast<size_t>(grid.nx + 1) * (j + dj)] = 1;
        }
    const auto nno = std::count(used.begin(), used.end(), 1);
    return 1.0 / std::sqrt(static_cast<double>(nno));
}

AssembledSystem assemble_interface(const CutSpace& phase1, const CutSpace& phase2, const FormParams& params,
                                   const Field& f1, const Field& f2, const Field& g1, const Field& g2)
{
    check_params(params);
    check_spd(params.A1, "A1");
    check_spd(params.A2, "A2");
    const auto& grid = phase1.mesh.grid;
    const auto& grid2 = phase2.mesh.grid;
    if (grid.nx != grid2.nx || grid.ny != grid2.ny || grid.cell_size != grid2.cell_size ||
        grid.origin != grid2.origin)
        throw std::invalid_argument("interface phases must share the background grid");
    if (!(phase1.family == phase2.family) || phase1.family.kind != FamilyKind::LagrangeQ)
        throw std::invalid_argument("interface problem expects one Lagrange family for both phases");

    const auto& ref = phase1.reference();
    const int nloc = ref.size();
    const int N1 = phase1.num_full();
    const int N = N1 + phase2.num_full();
    const double h = interface_h(phase1, phase2);
    const std::array<const CutSpace*, 2> phases{&phase1, &phase2};
    const std::array<const Eigen::Matrix2d*, 2> A{&params.A1, &params.A2};
    const std::array<const Field*, 2> f{&f1, &f2};
    const std::array<int, 2> offset{0, N1};

    Triplets t;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    Eigen::MatrixXd K_loc(nloc, nloc);

    for (int i = 0; i < 2; ++i)
    {
        const CutSpace& s = *phases[i];
        for (int a = 0; a < s.mesh.size(); ++a)
        {
            CellBasis basis(ref, s.mesh.cell(a));
            K_loc.setZero();
            const auto& vq = s.volume[a];
            const auto& dofs = s.dofs.cell_dofs[a];
            for (int q = 0; q < vq.size(); ++q)
            {
                basis.tabulate(vq.points[q], 1);
                Eigen::MatrixXd G(nloc, 2);
                G.col(0) = basis.d(1, 0);
                G.col(1) = basis.d(0, 1);
                K_loc.noalias() += vq.weights[q] * G * (*A[i]) * G.transpose();
                const double fx = vq.weights[q] * (*f[i])(vq.points[q]);
                for (int l = 0; l < nloc; ++l)
                    b[dofs[l] + offset[i]] += fx * basis.d(0, 0)[l];
            }
            scatter(t, dofs, dofs, K_loc, offset[i], offset[i]);
        }
    }

    // interface terms on cut cells of phase one; unknowns [local1; local2]
    std::vector<int> both(2 * nloc);
    Eigen::MatrixXd K_if(2 * nloc, 2 * nloc);
    for (int a1 = 0; a1 < phase1.mesh.size(); ++a1)
    {
        const auto& sq = phase1.boundary[a1];
        if (sq.empty())
            continue;
        const int cell = phase1.mesh.cells[a1];
        const int a2 = phase2.mesh.active_index[cell];
        if (a2 < 0)
            throw std::invalid_argument("interface along grid lines is not supported");
        const double k1 = interface_kappa(phase1, a1, params);
        const double k2 = 1.0 - k1;
        for (int l = 0; l < nloc; ++l)
        {
            both[l] = phase1.dofs.cell_dofs[a1][l];
            both[nloc + l] = phase2.dofs.cell_dofs[a2][l] + N1;
        }
        CellBasis basis(ref, phase1.mesh.cell(a1));
        K_if.setZero();
        for (int q = 0; q < sq.size(); ++q)
        {
            basis.tabulate(sq.points[q], 1);
            const Vec2 n1 = sq.normals[q];
            const std::array<Vec2, 2> n{n1, Vec2(-n1)};
            const Eigen::VectorXd& v = basis.d(0, 0);
            const double w = sq.weights[q];
            for (int i = 0; i < 2; ++i)
            {
                const Vec2 An = (*A[i]) * n[i];
                Eigen::VectorXd F = Eigen::VectorXd::Zero(2 * nloc);
                F.segment(i * nloc, nloc) = An.x() * basis.d(1, 0) + An.y() * basis.d(0, 1);
                // v_i - <v>
                Eigen::VectorXd r(2 * nloc);
                if (i == 0)
                {
                    r.head(nloc) = k2 * v;
                    r.tail(nloc) = -k2 * v;
                }
                else
                {
                    r.head(nloc) = -k1 * v;
                    r.tail(nloc) = k1 * v;
                }
                const double pen = params.beta / h * std::sqrt(n[i].dot(An));
                K_if.noalias() -= w * (F * r.transpose() + r * F.transpose());
                K_if.noalias() += (w * pen) * r * r.transpose();
            }
        }
        scatter(t, both, both, K_if);
    }

    AssembledSystem full;
    full.K = from_triplets(N, N, t);
    full.b = std::move(b);

    // block diagonal extension
    Triplets et;
    const int R1 = phase1.num_reduced();
    for (int i = 0; i < 2; ++i)
    {
        const auto& E = phases[i]->E.matrix;
        for (int r = 0; r < E.outerSize(); ++r)
            for (SparseMatrix::InnerIterator it(E, r); it; ++it)
                et.emplace_back(it.row() + offset[i], it.col() + (i == 0 ? 0 : R1), it.value());
    }
    ExtensionOperator E;
    E.matrix = from_triplets(N, R1 + phase2.num_reduced(), et);
    AssembledSystem sys = reduce(full, E);

    std::array<const Field*, 2> g{&g1, &g2};
    for (int i = 0; i < 2; ++i)
    {
        const auto& dofs = phases[i]->dofs;
        for (int r = 0; r < dofs.num_reduced(); ++r)
        {
            const Vec2& xi = dofs.nodes[dofs.interior_dofs[r]].xi;
            if (on_grid_boundary(grid, xi))
            {
                if (!*g[i])
                    throw std::invalid_argument("missing outer boundary data");
                sys.fixed.push_back(r + (i == 0 ? 0 : R1));
                sys.fixed_values.push_back((*g[i])(xi));
            }
        }
    }
    return sys;
}

namespace {

struct FreeSystem
{
    SparseMatrix K;
    Eigen::VectorXd b;
    std::vector<int> map; // full index -> free index, -1 if fixed
    Eigen::VectorXd x;    // fixed values in place, zero elsewhere
};

FreeSystem eliminate_fixed(const AssembledSystem& system)
{
    const int n = static_cast<int>(system.K.rows());
    FreeSystem fs;
    fs.map.assign(n, -1);
    fs.x = Eigen::VectorXd::Zero(n);
    std::vector<char> is_fixed(n, 0);
    for (size_t k = 0; k < system.fixed.size(); ++k)
    {
        fs.x[system.fixed[k]] = system.fixed_values[k];
        is_fixed[system.fixed[k]] = 1;
    }
    int m = 0;
    for (int i = 0; i < n; ++i)
        if (!is_fixed[i])
            fs.map[i] = m++;

    Triplets t;
    fs.b.resize(m);
    for (int r = 0; r < n; ++r)
    {
        if (fs.map[r] < 0)
            continue;
        double s = system.b[r];
        for (SparseMatrix::InnerIterator it(system.K, r); it; ++it)
        {
            const int c = static_cast<int>(it.col());
            if (fs.map[c] >= 0)
                t.emplace_back(fs.map[r], fs.map[c], it.value());
            else
                s -= it.value() * fs.x[c];
        }
        fs.b[fs.map[r]] = s;
    }
    fs.K = from_triplets(m, m, t);
    return fs;
}

} // namespace

SparseMatrix free_matrix(const AssembledSystem& system)
{
    if (system.fixed.empty())
        return system.K;
    return eliminate_fixed(system).K;
}

Eigen::VectorXd solve_system(const AssembledSystem& system, SolveOptions options, SolveReport* report)
{
    if (system.fixed.empty())
    {
        LinearSolver solver(system.K, options);
        Eigen::VectorXd x = solver.solve(system.b);
        if (report)
            *report = {solver.indefinite(), solver.last_residual()};
        return x;
    }
    FreeSystem fs = eliminate_fixed(system);
    LinearSolver solver(fs.K, options);
    const Eigen::VectorXd y = solver.solve(fs.b);
    if (report)
        *report = {solver.indefinite(), solver.last_residual()};
    for (size_t i = 0; i < fs.map.size(); ++i)
        if (fs.map[i] >= 0)
            fs.x[i] = y[fs.map[i]];
    return fs.x;
}

} // namespace cutfem
