#pragma once

#include "cutfem/forms.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutfem {

/// t -> field at time t
using TimeField = std::function<Field(double)>;

class StepError : public std::runtime_error
{
public:
    StepError(int step, const std::string& what, double residual)
        : std::runtime_error("time step " + std::to_string(step) + ": " + what), step_(step), residual_(residual)
    {
    }
    int step() const { return step_; }
    double residual() const { return residual_; }

private:
    int step_;
    double residual_;
};

struct Trajectory
{
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states; // reduced coefficients, states[0] = u0
};

/// Backward Euler for u_t + A u = f with the Nitsche form of A:
/// (M/tau + K) u^{n+1} = l_{n+1} + M u^n / tau, matrices assembled and
/// factorized once, load reassembled every step. g(t) is the boundary data.
Trajectory backward_euler_run(const CutSpace& space, const NitscheForm& form, const FormParams& params,
                              const TimeField& f, const TimeField& g, const Eigen::VectorXd& u0, double tau,
                              double t_final, bool keep_all = true);

/// sqrt(u^T M u)
double mass_norm(const SparseMatrix& M, const Eigen::VectorXd& u);

} // namespace cutfem
