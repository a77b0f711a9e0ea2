#include "cutfem/experiments.hpp"

#include "cutfem/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

namespace cutfem {

namespace {

// condition estimates are skipped above this many unknowns
constexpr int cond_max_dofs = 40000;

// the fine triharmonic levels sit at the rounding floor of a double solution
constexpr double study_residual_tolerance = 1e-8;

std::string join(const std::vector<std::string>& items, const char* sep = ",")
{
    std::string s;
    for (size_t i = 0; i < items.size(); ++i)
        s += (i ? sep : "") + items[i];
    return s;
}

std::string str(int i) { return std::to_string(i); }

SolveOptions study_solve_options()
{
    SolveOptions o;
    o.allow_indefinite = true;
    o.residual_tolerance = study_residual_tolerance;
    return o;
}

SpaceOptions space_options(const StudyOptions& o)
{
    SpaceOptions s;
    if (o.depth)
    {
        if (*o.depth < 0)
            throw std::invalid_argument("depth must be nonnegative");
        s.depth = *o.depth;
    }
    return s;
}

int level_count(const StudyOptions& o, int fallback)
{
    const int n = o.levels ? o.levels : fallback;
    if (n < 2)
        throw std::invalid_argument("need ≥ 2 levels");
    return n;
}

std::optional<double> condition_of(const SparseMatrix& K)
{
    if (K.rows() > cond_max_dofs)
        return std::nullopt;
    ConditionOptions co;
    co.allow_indefinite = true;
    try
    {
        return estimate_condition(K, co).cond;
    }
    catch (const std::exception&)
    {
        return std::nullopt;
    }
}

/// Grid of n cells per unit length overhanging [lo, lo + width]^2 by one cell.
BackgroundGrid padded_grid(double lo, double width, int n)
{
    const double cs = 1.0 / n;
    const int cells = static_cast<int>(std::lround(width * n)) + 2;
    return BackgroundGrid{Vec2(lo - cs, lo - cs), cells, cells, cs};
}

NormRow norm_row(const ErrorNorms& e, bool h2)
{
    NormRow r{e.l2, e.h1, std::nullopt, e.energy_sqrt()};
    if (h2)
        r[2] = e.h2;
    return r;
}

// bookkeeping shared by the solve-based studies
struct LevelLog
{
    std::vector<std::string> indefinite;
    double max_residual = 0.0;
    std::vector<std::string> energy_raw;

    void record(int level, const SolveReport& rep, const ErrorNorms& e)
    {
        if (rep.indefinite)
            indefinite.push_back(str(level));
        if (std::isfinite(rep.residual))
            max_residual = std::max(max_residual, rep.residual);
        energy_raw.push_back(format_number(e.energy));
    }
    void write(Study& s) const
    {
        s.add("indefinite_levels", indefinite.empty() ? "none" : join(indefinite));
        s.add("max_relative_residual", format_number(max_residual));
        s.add("energy_a_omega", join(energy_raw));
    }
};

LevelRecord space_record(const CutSpace& space)
{
    LevelRecord r;
    r.h = space.h();
    r.nno = space.mesh.nno;
    r.dofs_full = space.num_full();
    r.dofs_reduced = space.num_reduced();
    return r;
}

void finish(Study& s)
{
    std::vector<EocRow> rows;
    for (const auto& r : s.rows)
    {
        EocRow e{r.h, {}};
        for (const auto& v : r.errors)
            e.errors.push_back(v.value_or(0.0));
        rows.push_back(std::move(e));
    }
    const auto table = eoc_table(rows);
    s.eoc.clear();
    for (const auto& t : table)
    {
        NormRow row;
        for (int c = 0; c < num_norms; ++c)
            row[c] = t[c];
        s.eoc.push_back(row);
    }
}

Field cos_pi_r() { return Field::radial_series(cos_pi_sqrt_series()); }

// ---------------------------------------------------------------- poisson

Study poisson_study(const StudyOptions& o)
{
    const int k = o.order.value_or(2);
    const int levels = level_count(o, 4);
    FormParams p;
    p.beta = o.beta.value_or(100.0);
    const auto disc = LevelSetDomain::circle(Vec2::Zero(), 0.5);
    const Field u = cos_pi_r();
    const Field f = -1.0 * laplacian(u);
    const int n0 = 32;

    Study s;
    s.name = "poisson";
    s.expected_rates = {k + 1.0, double(k), k >= 2 ? std::optional<double>(k - 1.0) : std::nullopt, double(k)};
    LevelLog log;
    for (int l = 0; l < levels; ++l)
    {
        const int n = n0 << l;
        const auto space = make_cut_space(padded_grid(-0.5, 1.0, n), disc, ElementFamily::lagrange(k), space_options(o));
        const auto sys = assemble_poisson(space, p, f, u);
        SolveReport rep;
        const Eigen::VectorXd x = solve_system(sys, study_solve_options(), &rep);
        const auto e = error_norms(space, apply_expand(space.E, x), u, {VolumeOp::Gradient});
        LevelRecord r = space_record(space);
        r.errors = norm_row(e, k >= 2);
        r.cond_est = condition_of(free_matrix(sys));
        s.rows.push_back(r);
        log.record(l, rep, e);
    }
    s.add("family", ElementFamily::lagrange(k).name());
    s.add("beta", format_number(p.beta));
    s.add("domain", "disc center (0,0) radius 0.5");
    s.add("exact", "cos(pi r)");
    s.add("cells_per_unit", join({str(n0), "doubling"}));
    log.write(s);
    finish(s);
    return s;
}

// ---------------------------------------------------------------- interface

struct InterfaceCase
{
    Vec2 center{0.5, 0.5};
    double r0 = 0.25;
    Field u1, u2;
};

InterfaceCase interface_case()
{
    InterfaceCase c;
    const double r2 = c.r0 * c.r0;
    Eigen::VectorXd s1(2), s2(2);
    s1 << 0.0, -0.2;
    s2 << r2 / 2.0 - r2 / 5.0, -0.5;
    c.u1 = Field::radial_series(s1, c.center);
    c.u2 = Field::radial_series(s2, c.center);
    return c;
}

Study interface_study(const StudyOptions& o)
{
    const int k = o.order.value_or(1);
    const int levels = level_count(o, 4);
    FormParams p;
    p.beta = o.beta.value_or(10.0);
    p.kappa = KappaRule::AreaWeighted;
    p.A1 = 5.0 * Eigen::Matrix2d::Identity();
    p.A2 = 2.0 * Eigen::Matrix2d::Identity();
    const auto c = interface_case();
    const auto disc = LevelSetDomain::circle(c.center, c.r0);
    const Field f = Field::constant(4.0);
    const int n0 = 8;

    Study s;
    s.name = "interface";
    s.expected_rates = {k + 1.0, double(k), k >= 2 ? std::optional<double>(k - 1.0) : std::nullopt, double(k)};
    LevelLog log;
    for (int l = 0; l < levels; ++l)
    {
        const int n = n0 << l;
        const BackgroundGrid grid{Vec2::Zero(), n, n, 1.0 / n};
        const auto fam = ElementFamily::lagrange(k);
        const auto s1 = make_cut_space(grid, disc, fam, space_options(o));
        const auto s2 = make_cut_space(grid, disc.complement(), fam, space_options(o));
        const auto sys = assemble_interface(s1, s2, p, f, f, c.u1, c.u2);
        SolveReport rep;
        const Eigen::VectorXd x = solve_system(sys, study_solve_options(), &rep);
        const int n1 = s1.num_reduced();
        const auto e1 = error_norms(s1, apply_expand(s1.E, x.head(n1)), c.u1, {VolumeOp::Gradient, p.A1});
        const auto e2 = error_norms(s2, apply_expand(s2.E, x.tail(s2.num_reduced())), c.u2, {VolumeOp::Gradient, p.A2});
        const auto e = combine(e1, e2);
        LevelRecord r;
        r.h = interface_h(s1, s2);
        r.nno = static_cast<int>(std::lround(1.0 / (r.h * r.h)));
        r.dofs_full = s1.num_full() + s2.num_full();
        r.dofs_reduced = n1 + s2.num_reduced();
        r.errors = norm_row(e, k >= 2);
        r.cond_est = condition_of(free_matrix(sys));
        s.rows.push_back(r);
        log.record(l, rep, e);
    }
    s.add("family", ElementFamily::lagrange(k).name());
    s.add("beta", format_number(p.beta));
    s.add("kappa", "area weighted");
    s.add("A1", "5 I");
    s.add("A2", "2 I");
    s.add("domain", "disc center (0.5,0.5) radius 0.25 in (0,1)^2");
    s.add("cells_per_unit", join({str(n0), "doubling"}));
    log.write(s);
    finish(s);
    return s;
}

// ---------------------------------------------------------------- biharmonic

Study biharmonic_study(const StudyOptions& o)
{
    const int k = o.order.value_or(3);
    const int levels = level_count(o, 4);
    FormParams p;
    p.beta = o.beta.value_or(100.0);
    p.gamma = o.gamma.value_or(1.0);
    const double r0 = 0.5;
    const Vec2 center(0.5, 0.5);
    const auto disc = LevelSetDomain::circle(center, r0);
    Eigen::VectorXd g(3);
    g << std::pow(r0, 4), -2.0 * r0 * r0, 1.0;
    const Field u = Field::radial_series((1000.0 / 64.0) * g, center);
    const Field f = Field::constant(1000.0);
    const int n0 = 8;

    Study s;
    s.name = "biharmonic";
    s.expected_rates = {k + 1.0, double(k), k - 1.0, k - 1.0};
    LevelLog log;
    for (int l = 0; l < levels; ++l)
    {
        const int n = n0 << l;
        const auto space = make_cut_space(padded_grid(0.0, 1.0, n), disc, ElementFamily::hermite(k), space_options(o));
        const auto sys = assemble_biharmonic(space, p, f, u);
        SolveReport rep;
        const Eigen::VectorXd x = solve_system(sys, study_solve_options(), &rep);
        const auto e = error_norms(space, apply_expand(space.E, x), u, {VolumeOp::Laplacian});
        LevelRecord r = space_record(space);
        r.errors = norm_row(e, true);
        r.cond_est = condition_of(free_matrix(sys));
        s.rows.push_back(r);
        log.record(l, rep, e);
    }
    s.add("family", ElementFamily::hermite(k).name());
    s.add("beta", format_number(p.beta));
    s.add("gamma", format_number(p.gamma));
    s.add("domain", "disc center (0.5,0.5) radius 0.5");
    s.add("cells_per_unit", join({str(n0), "doubling"}));
    log.write(s);
    finish(s);
    return s;
}

// ---------------------------------------------------------------- triharmonic

Field triharmonic_exact()
{
    Eigen::VectorXd p(7); // x^3 (x - 1)^3
    p << 0, 0, 0, -1, 3, -3, 1;
    return 1e4 * Field::polynomial(tensor_polynomial(p, p));
}

Study triharmonic_study(const StudyOptions& o)
{
    const int k = o.order.value_or(5);
    if (k != 5)
        throw std::invalid_argument("triharmonic case uses Hermite k = 5");
    const int levels = level_count(o, 3);
    FormParams p;
    p.beta = o.beta.value_or(1000.0);
    const auto box = LevelSetDomain::axis_box({0.0, 0.0}, {1.0, 1.0});
    const Field u = triharmonic_exact();
    const Field f = -1.0 * laplacian(laplacian(laplacian(u)));
    const int n0 = 8;

    Study s;
    s.name = "triharmonic";
    s.expected_rates = {6.0, 5.0, 4.0, 3.0};
    LevelLog log;
    for (int l = 0; l < levels; ++l)
    {
        // grid over (-0.21, 1.1) x (-0.31, 1.1)
        const int nx = n0 << l;
        const double cs = 1.31 / nx;
        const int ny = static_cast<int>(std::ceil(1.41 / cs - 1e-12));
        const BackgroundGrid grid{Vec2(-0.21, -0.31), nx, ny, cs};
        const auto space = make_cut_space(grid, box, ElementFamily::hermite(5), space_options(o));
        const auto sys = assemble_triharmonic(space, p, f, u);
        SolveReport rep;
        const Eigen::VectorXd x = solve_system(sys, study_solve_options(), &rep);
        const auto e = error_norms(space, apply_expand(space.E, x), u, {VolumeOp::GradLaplacian});
        LevelRecord r = space_record(space);
        r.errors = norm_row(e, true);
        r.cond_est = condition_of(free_matrix(sys));
        s.rows.push_back(r);
        log.record(l, rep, e);
    }
    s.add("family", ElementFamily::hermite(5).name());
    s.add("beta", format_number(p.beta));
    s.add("domain", "unit square, grid over (-0.21,1.1)x(-0.31,1.1)");
    s.add("cells_x", join({str(n0), "doubling"}));
    log.write(s);
    finish(s);
    return s;
}

// ---------------------------------------------------------------- heat

Study heat_study(const StudyOptions& o)
{
    const int k = o.order.value_or(2);
    const int levels = level_count(o, 4);
    FormParams p;
    p.beta = o.beta.value_or(100.0);
    const auto disc = LevelSetDomain::circle(Vec2::Zero(), 0.5);
    const int n = 32;
    const auto space = make_cut_space(padded_grid(-0.5, 1.0, n), disc, ElementFamily::lagrange(k), space_options(o));
    const auto form = poisson_form();
    const Field U = cos_pi_r();
    const Field lapU = laplacian(U);
    const double t_final = 1.0, tau0 = 0.1;

    Study s;
    s.name = "heat";
    s.expected_rates = {1.0, 1.0, std::nullopt, std::nullopt};

    // u = exp(-t) cos(pi r), f = u_t - lap u
    const TimeField g = [&](double t) { return std::exp(-t) * U; };
    const TimeField f = [&](double t) { return (-std::exp(-t)) * (U + lapU); };
    const Eigen::VectorXd u0 = interpolate_pi_E(U, space.dofs, space.E).reduced;
    for (int l = 0; l < levels; ++l)
    {
        const double tau = tau0 / (1 << l);
        const auto traj = backward_euler_run(space, form, p, f, g, u0, tau, t_final, false);
        const auto e = error_norms(space, apply_expand(space.E, traj.states.back()), g(t_final), {VolumeOp::Gradient});
        LevelRecord r = space_record(space);
        r.h = tau;
        r.errors = {e.l2, e.h1, std::nullopt, std::nullopt};
        s.rows.push_back(r);
    }

    // stationary data: the discrete steady state must not drift
    const TimeField gs = [&](double) { return U; };
    const TimeField fs = [&](double) { return -1.0 * lapU; };
    const Eigen::VectorXd steady = solve_system(assemble_poisson(space, p, -1.0 * lapU, U));
    const double tau_s = 0.01;
    const auto traj = backward_euler_run(space, form, p, fs, gs, steady, tau_s, 100 * tau_s, true);
    double drift = 0.0;
    for (const auto& u : traj.states)
        drift = std::max(drift, (u - steady).cwiseAbs().maxCoeff());

    s.add("family", ElementFamily::lagrange(k).name());
    s.add("beta", format_number(p.beta));
    s.add("h_column", "time step tau");
    s.add("space_h", format_number(space.h()));
    s.add("t_final", format_number(t_final));
    s.add("exact", "exp(-t) cos(pi r)");
    s.add("stationary_steps", str(static_cast<int>(traj.states.size()) - 1));
    s.add("stationary_drift", format_number(drift));
    finish(s);
    return s;
}

// ---------------------------------------------------------------- sliver

// (grad v, grad w) + (v, w) over the cut domain: no extension and no penalty
SparseMatrix cut_gram(const CutSpace& space)
{
    NitscheForm form;
    form.volume = VolumeOp::Gradient;
    form.name = "cut stiffness";
    FormParams p;
    const SparseMatrix K = assemble_nitsche_full(space, form, p, Field::constant(0.0), Field()).K;
    return SparseMatrix(K + assemble_mass_full(space));
}

Study sliver_study(const StudyOptions& o)
{
    const int k = o.order.value_or(2);
    FormParams p;
    p.beta = o.beta.value_or(100.0);
    const double eps_min = o.eps.value_or(1e-8);
    if (!(eps_min > 0.0) || eps_min >= 1e-6)
        throw std::invalid_argument("eps must lie in (0, 1e-6)");
    const std::vector<double> sweep{0.0, 1e-3, 1e-6, eps_min};
    if (o.levels && o.levels < 2)
        throw std::invalid_argument("need ≥ 2 levels");
    const int n = 32;
    const Field u = cos_pi_r();
    const Field f = -1.0 * laplacian(u);
    constexpr int samples = 50;

    Study s;
    s.name = "sliver";
    std::vector<std::string> eps_s, full_s, ratio0_s, ratio1_s, min_area_s;
    for (double eps : sweep)
    {
        // the grid lines x, y = +-0.5 leave slivers of width eps outside them
        const auto disc = LevelSetDomain::circle(Vec2::Zero(), 0.5 + eps);
        const auto space = make_cut_space(padded_grid(-0.5, 1.0, n), disc, ElementFamily::lagrange(k), space_options(o));
        const auto sys = assemble_poisson(space, p, f, u);
        LevelRecord r = space_record(space);
        r.cond_est = condition_of(free_matrix(sys));

        double min_area = 1.0;
        for (const auto& q : space.volume)
            min_area = std::min(min_area, q.total_weight() / (space.mesh.grid.cell_size * space.mesh.grid.cell_size));

        std::mt19937 rng(20240611);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::array<double, 2> ratio{0.0, 0.0};
        for (int t = 0; t < samples; ++t)
        {
            Eigen::VectorXd v(space.num_reduced());
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v[i] = uni(rng);
            const Eigen::VectorXd full = apply_expand(space.E, v);
            for (int j = 0; j < 2; ++j)
                ratio[j] = std::max(ratio[j], broken_seminorm(space, full, j, CellSet::Active) /
                                                  broken_seminorm(space, full, j, CellSet::Interior));
        }

        ConditionOptions co;
        co.allow_indefinite = true;
        const double cond_full = estimate_condition(cut_gram(space), co).cond;
        s.rows.push_back(r);
        eps_s.push_back(format_number(eps));
        full_s.push_back(format_number(cond_full));
        ratio0_s.push_back(format_number(ratio[0]));
        ratio1_s.push_back(format_number(ratio[1]));
        min_area_s.push_back(format_number(min_area));
    }
    s.add("family", ElementFamily::lagrange(k).name());
    s.add("beta", format_number(p.beta));
    s.add("h_column", "1/sqrt(NNO) per sweep entry");
    s.add("domain", "disc center (0,0) radius 0.5 + eps");
    s.add("cells_per_unit", str(n));
    s.add("eps", join(eps_s));
    s.add("min_area_fraction", join(min_area_s));
    s.add("cond_reduced", [&] {
        std::vector<std::string> c;
        for (const auto& r : s.rows)
            c.push_back(r.cond_est ? format_number(*r.cond_est) : "");
        return join(c);
    }());
    s.add("cond_cut_gram", join(full_s));
    s.add("stability_ratio_j0", join(ratio0_s));
    s.add("stability_ratio_j1", join(ratio1_s));
    s.add("stability_samples", str(samples));
    return s;
}

// ---------------------------------------------------------------- extension properties

ElementFamily family_of_order(int k)
{
    return k <= 2 ? ElementFamily::lagrange(k) : ElementFamily::hermite(k);
}

double reproduction_error(ElementFamily fam, std::mt19937& rng)
{
    const auto disc = LevelSetDomain::circle(Vec2::Zero(), 0.5);
    const auto space = make_cut_space(padded_grid(-0.5, 1.0, 8), disc, fam);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t)
    {
        Eigen::MatrixXd c(fam.order + 1, fam.order + 1);
        for (Eigen::Index i = 0; i < c.size(); ++i)
            c.data()[i] = uni(rng);
        const Field poly = Field::polynomial(c);
        const Eigen::VectorXd all = nodal_values(space.dofs, poly);
        Eigen::VectorXd interior(space.num_reduced());
        for (int r = 0; r < space.num_reduced(); ++r)
            interior[r] = all[space.dofs.interior_dofs[r]];
        // compare in reference units: a derivative dof of order |alpha| carries h^-|alpha|
        Eigen::VectorXd scale(all.size());
        for (int g = 0; g < space.num_full(); ++g)
        {
            const auto& a = space.dofs.nodes[g].alpha;
            scale[g] = std::pow(space.mesh.grid.cell_size, a[0] + a[1]);
        }
        const double err = (apply_expand(space.E, interior) - all).cwiseProduct(scale).cwiseAbs().maxCoeff();
        worst = std::max(worst, err / all.cwiseProduct(scale).cwiseAbs().maxCoeff());
    }
    return worst;
}

std::vector<LevelRecord> interpolation_rows(ElementFamily fam, int levels, const StudyOptions& o)
{
    const auto disc = LevelSetDomain::circle(Vec2::Zero(), 0.5);
    const Field u = cos_pi_r();
    std::vector<LevelRecord> rows;
    for (int l = 0; l < levels; ++l)
    {
        const auto space = make_cut_space(padded_grid(-0.5, 1.0, 32 << l), disc, fam, space_options(o));
        const auto pi = interpolate_pi_E(u, space.dofs, space.E);
        const auto e = error_norms(space, pi.full, u, {VolumeOp::Gradient});
        LevelRecord r = space_record(space);
        r.errors = norm_row(e, fam.order >= 2);
        rows.push_back(r);
    }
    return rows;
}

std::string eoc_string(const std::vector<LevelRecord>& rows, int column)
{
    Study tmp;
    tmp.rows = rows;
    finish(tmp);
    std::vector<std::string> v;
    for (const auto& e : tmp.eoc)
        v.push_back(e[column] ? format_number(*e[column]) : "");
    return join(v);
}

Study extension_study(const StudyOptions& o)
{
    const int k = o.order.value_or(2);
    if (k != 1 && k != 2 && k != 3 && k != 5)
        throw std::invalid_argument("order must be 1, 2 (Lagrange) or 3, 5 (Hermite)");
    const int levels = level_count(o, 4);

    Study s;
    s.name = "extension-props";
    const ElementFamily fam = family_of_order(k);
    s.expected_rates = {k + 1.0, double(k), k >= 2 ? std::optional<double>(k - 1.0) : std::nullopt, std::nullopt};
    s.rows = interpolation_rows(fam, levels, o);
    for (auto& r : s.rows)
        r.errors[3].reset();

    std::mt19937 rng(7);
    for (const auto& f : {ElementFamily::lagrange(1), ElementFamily::lagrange(2), ElementFamily::hermite(3),
                          ElementFamily::hermite(5)})
        s.add("reproduction_" + f.name(), format_number(reproduction_error(f, rng)));
    for (const auto& f : {ElementFamily::lagrange(2), ElementFamily::hermite(3)})
    {
        const auto rows = f == fam ? s.rows : interpolation_rows(f, levels, o);
        s.add("interp_eoc_l2_" + f.name(), eoc_string(rows, 0));
        s.add("interp_eoc_h1_" + f.name(), eoc_string(rows, 1));
    }
    s.add("family", fam.name());
    s.add("domain", "disc center (0,0) radius 0.5");
    s.add("cells_per_unit", join({"32", "doubling"}));
    s.add("reproduction_measure", "max error over max dof, dofs in reference units");
    finish(s);
    return s;
}

// ---------------------------------------------------------------- checks

std::optional<double> mean_last_two(const Study& s, int column)
{
    if (s.eoc.size() < 2)
        return std::nullopt;
    const auto& a = s.eoc[s.eoc.size() - 2][column];
    const auto& b = s.eoc.back()[column];
    if (!a || !b)
        return std::nullopt;
    return 0.5 * (*a + *b);
}

bool within(std::optional<double> value, double target, double tol)
{
    return value && std::abs(*value - target) <= tol;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> v;
    size_t pos = 0;
    while (pos <= text.size())
    {
        const size_t end = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, end - pos);
        v.push_back(item.empty() ? std::nan("") : std::stod(item));
        pos = end + 1;
    }
    return v;
}

std::string show(std::optional<double> v) { return v ? format_number(*v) : "undefined"; }

Criterion rate_criterion(const Study& s, int id, const std::string& name, const std::vector<int>& columns,
                         const std::vector<double>& targets, double tol)
{
    Criterion c{id, name, true, ""};
    static const char* labels[] = {"l2", "h1", "h2", "energy"};
    for (size_t i = 0; i < columns.size(); ++i)
    {
        const auto m = mean_last_two(s, columns[i]);
        const bool ok = within(m, targets[i], tol);
        c.pass = c.pass && ok;
        c.detail += std::string(i ? " " : "") + labels[columns[i]] + " eoc " + show(m) + " (want " +
                    format_number(targets[i]) + " +- " + format_number(tol) + ")";
    }
    return c;
}

} // namespace

std::optional<std::string> Study::find(const std::string& key) const
{
    for (const auto& [k, v] : metadata)
        if (k == key)
            return v;
    return std::nullopt;
}

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

const std::vector<std::string>& study_names()
{
    static const std::vector<std::string> names{"poisson", "interface",  "biharmonic",     "triharmonic",
                                                "heat",    "sliver",     "extension-props"};
    return names;
}

Study run_study(const std::string& name, const StudyOptions& options)
{
    static const std::map<std::string, std::function<Study(const StudyOptions&)>> runners{
        {"poisson", poisson_study}, {"interface", interface_study},   {"biharmonic", biharmonic_study},
        {"triharmonic", triharmonic_study}, {"heat", heat_study}, {"sliver", sliver_study},
        {"extension-props", extension_study}};
    const auto it = runners.find(name);
    if (it == runners.end())
        throw std::invalid_argument("unknown case '" + name + "'");
    Study s = it->second(options);
    s.metadata.insert(s.metadata.begin(), {"case", name});
    return s;
}

std::vector<Criterion> check_study(const Study& s)
{
    std::vector<Criterion> out;
    if (s.name == "poisson")
        out.push_back(rate_criterion(s, 1, "poisson convergence", {0, 1},
                                     {*s.expected_rates[0], *s.expected_rates[1]}, 0.4));
    else if (s.name == "interface")
        out.push_back(rate_criterion(s, 2, "interface convergence", {0, 1},
                                     {*s.expected_rates[0], *s.expected_rates[1]}, 0.4));
    else if (s.name == "biharmonic")
        out.push_back(rate_criterion(s, 3, "biharmonic convergence", {0, 1, 2},
                                     {*s.expected_rates[0], *s.expected_rates[1], *s.expected_rates[2]}, 0.5));
    else if (s.name == "triharmonic")
    {
        Criterion c{4, "triharmonic energy convergence", true, "sqrt energy eoc"};
        for (const auto& e : s.eoc)
        {
            c.pass = c.pass && e[3] && *e[3] >= 2.5;
            c.detail += " " + show(e[3]);
        }
        c.detail += " (want >= 2.5), errors";
        for (size_t i = 0; i < s.rows.size(); ++i)
        {
            const auto& v = s.rows[i].errors[3];
            c.detail += " " + show(v);
            if (i > 0)
                c.pass = c.pass && v && s.rows[i - 1].errors[3] && *v < *s.rows[i - 1].errors[3];
        }
        c.detail += " (want decreasing)";
        out.push_back(c);
    }
    else if (s.name == "heat")
    {
        const double drift = std::stod(s.find("stationary_drift").value_or("nan"));
        Criterion c{9, "parabolic stationarity and first order in time", drift < 1e-8, ""};
        c.detail = "drift " + format_number(drift) + " (want < 1e-08), ratios";
        for (size_t i = 1; i < s.rows.size(); ++i)
        {
            const auto& a = s.rows[i - 1].errors[0];
            const auto& b = s.rows[i].errors[0];
            const double ratio = (a && b && *b > 0.0) ? *a / *b : std::nan("");
            c.pass = c.pass && ratio >= 1.6 && ratio <= 2.4;
            c.detail += " " + format_number(ratio);
        }
        c.detail += " (want 2 +- 20%)";
        out.push_back(c);
    }
    else if (s.name == "sliver")
    {
        Criterion c{5, "extension stability under slivers", true, ""};
        for (const char* key : {"stability_ratio_j0", "stability_ratio_j1"})
        {
            const auto v = parse_list(s.find(key).value_or(""));
            const double spread = *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
            c.pass = c.pass && spread < 2.0;
            c.detail += std::string(key) + " spread " + format_number(spread) + " (want < 2); ";
        }
        double lo = INFINITY, hi = 0.0;
        for (const auto& r : s.rows)
        {
            const double v = r.cond_est.value_or(std::nan(""));
            c.pass = c.pass && std::isfinite(v);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        c.pass = c.pass && hi / lo < 10.0;
        const auto full = parse_list(s.find("cond_cut_gram").value_or(""));
        const double blowup = full.back() / full.front();
        c.pass = c.pass && blowup > 1e3;
        c.detail += "cond(K_red) spread " + format_number(hi / lo) + " (want < 10); cut stiffness cond ratio " +
                    format_number(blowup) + " (want > 1e3)";
        out.push_back(c);
    }
    else if (s.name == "extension-props")
    {
        Criterion c6{6, "extension polynomial reproduction", true, ""};
        for (const auto& f : {ElementFamily::lagrange(1), ElementFamily::lagrange(2), ElementFamily::hermite(3),
                              ElementFamily::hermite(5)})
        {
            const double e = std::stod(s.find("reproduction_" + f.name()).value_or("nan"));
            c6.pass = c6.pass && e <= 1e-12;
            c6.detail += f.name() + " " + format_number(e) + " ";
        }
        c6.detail += "(want <= 1e-12)";
        out.push_back(c6);

        Criterion c7{7, "interpolation rates", true, ""};
        for (const auto& [f, k] : {std::pair{ElementFamily::lagrange(2), 2}, std::pair{ElementFamily::hermite(3), 3}})
            for (int m = 0; m < 2; ++m)
            {
                const auto v = parse_list(s.find((m ? "interp_eoc_h1_" : "interp_eoc_l2_") + f.name()).value_or(""));
                std::optional<double> mean;
                if (v.size() >= 2 && std::isfinite(v[v.size() - 1]) && std::isfinite(v[v.size() - 2]))
                    mean = 0.5 * (v[v.size() - 1] + v[v.size() - 2]);
                const bool ok = within(mean, k + 1.0 - m, 0.4);
                c7.pass = c7.pass && ok;
                c7.detail += f.name() + " m=" + str(m) + " " + show(mean) + " (want " + format_number(k + 1.0 - m) +
                             " +- 0.4) ";
            }
        out.push_back(c7);
    }
    return out;
}

// ---------------------------------------------------------------- patch tests

std::vector<PatchResult> patch_tests()
{
    std::vector<PatchResult> out;
    const SolveOptions so = study_solve_options();
    // max |u_h - u| over the volume and boundary quadrature points of the cut cells
    auto pointwise_error = [](const CutSpace& space, const Eigen::VectorXd& reduced, const Field& exact) {
        const Eigen::VectorXd full = apply_expand(space.E, reduced);
        double e = 0.0;
        for (int a = 0; a < space.mesh.size(); ++a)
            for (const auto* rule : {&space.volume[a], &space.boundary[a]})
                for (const Vec2& x : rule->points)
                    e = std::max(e, std::abs(evaluate_function(space, full, a, x, 0, 0) - exact(x)));
        return e;
    };
    const Field zero = Field::constant(0.0);
    {
        const auto disc = LevelSetDomain::circle(Vec2::Zero(), 0.5);
        const auto space = make_cut_space(padded_grid(-0.5, 1.0, 9), disc, ElementFamily::lagrange(1));
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
        c(1, 0) = 1.0;
        const Field p = Field::polynomial(c);
        FormParams fp;
        const auto x = solve_system(assemble_poisson(space, fp, zero, p), so);
        out.push_back({"poisson u = x", pointwise_error(space, x, p)});
    }
    {
        // planar interface x = 0.5 cutting the middle column of cells
        const int n = 9;
        const BackgroundGrid grid{Vec2::Zero(), n, n, 1.0 / n};
        const auto left = LevelSetDomain::half_plane(Vec2(1.0, 0.0), 0.5);
        const auto s1 = make_cut_space(grid, left, ElementFamily::lagrange(1));
        const auto s2 = make_cut_space(grid, left.complement(), ElementFamily::lagrange(1));
        Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(2, 2), c2 = Eigen::MatrixXd::Zero(2, 2);
        c1(1, 0) = 2.0;
        c2(0, 0) = -1.5;
        c2(1, 0) = 5.0;
        const Field u1 = Field::polynomial(c1), u2 = Field::polynomial(c2);
        FormParams fp;
        fp.beta = 10.0;
        fp.A1 = 5.0 * Eigen::Matrix2d::Identity();
        fp.A2 = 2.0 * Eigen::Matrix2d::Identity();
        const auto x = solve_system(assemble_interface(s1, s2, fp, zero, zero, u1, u2), so);
        const double e = std::max(pointwise_error(s1, x.head(s1.num_reduced()), u1),
                                  pointwise_error(s2, x.tail(s2.num_reduced()), u2));
        out.push_back({"interface piecewise linear", e});
    }
    {
        const auto disc = LevelSetDomain::circle(Vec2(0.5, 0.5), 0.5);
        const auto space = make_cut_space(padded_grid(0.0, 1.0, 8), disc, ElementFamily::hermite(3));
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
        c(1, 1) = 1.0;
        const Field p = Field::polynomial(c);
        FormParams fp;
        const auto x = solve_system(assemble_biharmonic(space, fp, zero, p), so);
        out.push_back({"biharmonic u = xy", pointwise_error(space, x, p)});
    }
    {
        const auto box = LevelSetDomain::axis_box({0.0, 0.0}, {1.0, 1.0});
        const int nx = 8;
        const double cs = 1.31 / nx;
        const BackgroundGrid grid{Vec2(-0.21, -0.31), nx, static_cast<int>(std::ceil(1.41 / cs)), cs};
        const auto space = make_cut_space(grid, box, ElementFamily::hermite(5));
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, 1);
        c(3, 0) = 1.0;
        const Field p = Field::polynomial(c);
        FormParams fp;
        fp.beta = 1000.0;
        const auto x = solve_system(assemble_triharmonic(space, fp, zero, p), so);
        out.push_back({"triharmonic u = x^3", pointwise_error(space, x, p)});
    }
    return out;
}

Criterion check_patch_tests(const std::vector<PatchResult>& results)
{
    Criterion c{8, "patch tests", true, ""};
    for (const auto& r : results)
    {
        c.pass = c.pass && r.max_error < 1e-7;
        c.detail += r.name + " " + format_number(r.max_error) + "; ";
    }
    c.detail += "(want < 1e-07)";
    return c;
}

} // namespace cutfem
