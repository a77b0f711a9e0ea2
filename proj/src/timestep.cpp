#include "cutfem/timestep.hpp"

#include <cmath>

namespace cutfem {

Trajectory backward_euler_run(const CutSpace& space, const NitscheForm& form, const FormParams& params,
                              const TimeField& f, const TimeField& g, const Eigen::VectorXd& u0, double tau,
                              double t_final, bool keep_all)
{
    if (!(tau > 0.0))
        throw std::invalid_argument("time step must be positive");
    if (!(t_final >= 0.0))
        throw std::invalid_argument("final time must be nonnegative");
    if (u0.size() != space.num_reduced())
        throw std::invalid_argument("initial state does not match the reduced space");
    const SparseMatrix M = assemble_mass(space);
    const Field f0 = f(0.0), g0 = g(0.0);
    const SparseMatrix K = reduce(assemble_nitsche_full(space, form, params, f0, g0).K, space.E);
    const SparseMatrix S = ((1.0 / tau) * M + K).pruned();
    LinearSolver solver(S);

    const int steps = static_cast<int>(std::lround(t_final / tau));
    if (std::abs(steps * tau - t_final) > 1e-9 * std::max(1.0, t_final))
        throw std::invalid_argument("final time must be a multiple of the time step");
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    Eigen::VectorXd u = u0;
    for (int n = 1; n <= steps; ++n)
    {
        const double t = n * tau;
        Eigen::VectorXd rhs = restrict(space.E, assemble_nitsche_rhs_full(space, form, params, f(t), g(t)));
        rhs.noalias() += multiply(M, u) / tau;
        try
        {
            u = solver.solve(rhs);
        }
        catch (const SolveError& e)
        {
            throw StepError(n, e.what(), e.residual());
        }
        if (keep_all || n == steps)
        {
            traj.times.push_back(t);
            traj.states.push_back(u);
        }
    }
    return traj;
}

double mass_norm(const SparseMatrix& M, const Eigen::VectorXd& u)
{
    return std::sqrt(std::max(0.0, u.dot(multiply(M, u))));
}

} // namespace cutfem
