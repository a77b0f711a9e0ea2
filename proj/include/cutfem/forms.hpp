#pragma once

#include "cutfem/fields.hpp"
#include "cutfem/space.hpp"

#include <vector>

namespace cutfem {

enum class KappaRule { AreaWeighted, Fixed };

struct FormParams
{
    double beta = 100.0;
    double gamma = 1.0;
    KappaRule kappa = KappaRule::AreaWeighted;
    double kappa1 = 0.5; // used with KappaRule::Fixed
    Eigen::Matrix2d A1 = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d A2 = Eigen::Matrix2d::Identity();
};

enum class Coordinates { Full, Reduced };

struct AssembledSystem
{
    SparseMatrix K;
    Eigen::VectorXd b;
    Coordinates coordinates = Coordinates::Full;
    // strongly imposed unknowns (reduced coordinates), ascending
    std::vector<int> fixed;
    std::vector<double> fixed_values;
};

/// Differential operators appearing in volume forms.
enum class VolumeOp { Value, Gradient, Laplacian, GradLaplacian };

/// Boundary traces; n is the outward unit normal.
enum class TraceOp { Value, Normal, Laplacian, NormalLaplacian, Bilaplacian, NormalBilaplacian };

int derivative_order(VolumeOp op);
int derivative_order(TraceOp op);

/// Symmetric Nitsche form
///   a_h(v, w) = a_Omega(v, w) - a_d(v, w) - a_d(w, v) + beta b(v, w)
///   l_h(w)    = (f, w) - a_d(w, g) + beta b(w, g)
/// with a_Omega = (op v, op w), a_d(v, w) = sum sign (left v, right w) on the
/// boundary and b(v, w) = sum weight h^-p (op v, op w).
struct NitscheForm
{
    struct Consistency
    {
        double sign;
        TraceOp left, right;
    };
    struct Penalty
    {
        double weight;
        int h_power;
        TraceOp op;
    };
    VolumeOp volume = VolumeOp::Gradient;
    std::vector<Consistency> consistency;
    std::vector<Penalty> penalty;
    int min_continuity = 0;
    std::string name;
};

NitscheForm poisson_form();
NitscheForm biharmonic_form(double gamma);
NitscheForm triharmonic_form();

/// Full-coordinate assembly of a Nitsche form. g supplies boundary data and
/// its derivatives (in practice the exact solution).
AssembledSystem assemble_nitsche_full(const CutSpace& space, const NitscheForm& form, const FormParams& params,
                                      const Field& f, const Field& g);

/// Right-hand side l_h only.
Eigen::VectorXd assemble_nitsche_rhs_full(const CutSpace& space, const NitscheForm& form, const FormParams& params,
                                          const Field& f, const Field& g);

/// K_red = E^T K E, b_red = E^T b.
AssembledSystem reduce(const AssembledSystem& full, const ExtensionOperator& E);
SparseMatrix reduce(const SparseMatrix& K, const ExtensionOperator& E);

AssembledSystem assemble_poisson(const CutSpace& space, const FormParams& params, const Field& f, const Field& g);
AssembledSystem assemble_biharmonic(const CutSpace& space, const FormParams& params, const Field& f, const Field& g);
AssembledSystem assemble_triharmonic(const CutSpace& space, const FormParams& params, const Field& f,
                                     const Field& g);

/// (v, w) over T ∩ Omega.
SparseMatrix assemble_mass_full(const CutSpace& space);
SparseMatrix assemble_mass(const CutSpace& space);

/// Load (f, w) over T ∩ Omega in full coordinates.
Eigen::VectorXd assemble_load_full(const CutSpace& space, const Field& f);

/// kappa_1 on the active cell `cell` of phase one.
double interface_kappa(const CutSpace& phase1, int cell, const FormParams& params);

/// 1 / sqrt(NNO) over the union of both phases' active meshes.
double interface_h(const CutSpace& phase1, const CutSpace& phase2);

/// Two-phase problem -div(A_i grad u_i) = f_i, continuous value and flux on
/// the interface. phase2 must live on the same grid with the complementary
/// domain. Data g_i is imposed strongly on reduced dofs on the grid boundary.
/// Unknowns are [phase1 reduced; phase2 reduced].
AssembledSystem assemble_interface(const CutSpace& phase1, const CutSpace& phase2, const FormParams& params,
                                   const Field& f1, const Field& f2, const Field& g1, const Field& g2);

struct SolveReport
{
    bool indefinite = false;
    double residual = 0.0;
};

/// Matrix acting on the unknowns that are not strongly imposed.
SparseMatrix free_matrix(const AssembledSystem& system);

/// Solve with strongly imposed unknowns eliminated.
Eigen::VectorXd solve_system(const AssembledSystem& system, SolveOptions options = {},
                             SolveReport* report = nullptr);

} // namespace cutfem
