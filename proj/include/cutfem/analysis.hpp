#pragma once

#include "cutfem/forms.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace cutfem {

struct ErrorNorms
{
    double l2 = 0.0;
    double h1 = 0.0; // seminorm
    double h2 = 0.0; // seminorm, |D^2 e|_F
    double energy = 0.0; // a_Omega(e, e)
    double energy_sqrt() const { return std::sqrt(energy); }
};

/// Principal form used for the energy error.
struct EnergyForm
{
    VolumeOp op = VolumeOp::Gradient;
    Eigen::Matrix2d A = Eigen::Matrix2d::Identity(); // weights the gradient form only
};

/// Norms of e = exact - u_h over T ∩ Omega, u_h given by full coefficients.
ErrorNorms error_norms(const CutSpace& space, const Eigen::VectorXd& u_full, const Field& exact,
                       const EnergyForm& energy = {});

/// Squares add: norms of a function living on two disjoint phases.
ErrorNorms combine(const ErrorNorms& a, const ErrorNorms& b);

enum class CellSet { Active, Interior };

/// |D^j v| over whole cells (cells of Omega_h, or interior cells only), j <= 2.
double broken_seminorm(const CutSpace& space, const Eigen::VectorXd& v_full, int j, CellSet cells);

/// EOC log(e_i / e_{i+1}) / log(h_i / h_{i+1}) per column; undefined where
/// an error is not positive. Result has rows.size() - 1 entries.
struct EocRow
{
    double h;
    std::vector<double> errors;
};
std::vector<std::vector<std::optional<double>>> eoc_table(const std::vector<EocRow>& rows);

} // namespace cutfem
