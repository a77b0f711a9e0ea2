#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <stdexcept>
#include <string>

namespace cutfem {

/// Compressed row storage; symmetric matrices keep both triangles.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// y = K x. Each row is summed left to right over its stored (ascending) columns.
Eigen::VectorXd multiply(const SparseMatrix& K, const Eigen::VectorXd& x);

/// max |K - K^T| / max |K|
double symmetry_defect(const SparseMatrix& K);

class SolveError : public std::runtime_error
{
public:
    SolveError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

enum class SolveMethod { Direct, ConjugateGradient };

struct SolveOptions
{
    SolveMethod method = SolveMethod::Direct;
    /// fall back to CG when the direct factorization breaks down
    bool fallback = true;
    double cg_tolerance = 1e-12;
    /// CG iteration cap as a multiple of the dimension
    int cg_max_factor = 20;
    /// accept symmetric indefinite matrices (pivoting LU instead of LDL^T)
    bool allow_indefinite = false;
    /// accepted relative residual; the direct paths measure it on the equilibrated system
    double residual_tolerance = 1e-10;
};

/// Factorizes once, solves many right-hand sides.
class LinearSolver
{
public:
    explicit LinearSolver(const SparseMatrix& K, SolveOptions options = {});
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    SolveMethod method() const { return method_; }
    /// LDL^T met a nonpositive pivot
    bool indefinite() const;
    /// relative residual of the most recent solve
    double last_residual() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SolveMethod method_;
};

Eigen::VectorXd solve(const SparseMatrix& K, const Eigen::VectorXd& b, SolveOptions options = {});

struct ConditionEstimate
{
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    double cond = 0.0;
    int iterations_max = 0;
    int iterations_min = 0;
};

struct ConditionOptions
{
    int max_iterations = 200;
    double tolerance = 1e-8;
    /// estimate |lambda| extremes of a symmetric indefinite matrix
    bool allow_indefinite = false;
};

/// Power iteration on K and on K^{-1}.
ConditionEstimate estimate_condition(const SparseMatrix& K, ConditionOptions options = {});

} // namespace cutfem
