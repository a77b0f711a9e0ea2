#include "cutfem/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <optional>

namespace cutfem {

namespace {

using ColMajor = Eigen::SparseMatrix<double>;

// b - K x with extended-precision accumulation, so refinement can push the
// residual below the rounding level of a plain double product
Eigen::VectorXd residual(const SparseMatrix& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    Eigen::VectorXd r(K.rows());
    for (Eigen::Index i = 0; i < K.rows(); ++i)
    {
        long double s = b[i];
        for (SparseMatrix::InnerIterator it(K, i); it; ++it)
            s -= static_cast<long double>(it.value()) * x[it.col()];
        r[i] = static_cast<double>(s);
    }
    return r;
}

double relative_residual(const SparseMatrix& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double nb = b.norm();
    const double nr = residual(K, x, b).norm();
    return nb > 0.0 ? nr / nb : nr;
}

// same, measured on the equilibrated system S K S y = S b
double scaled_residual(const SparseMatrix& K, const Eigen::VectorXd& scale, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& b)
{
    const double nb = scale.cwiseProduct(b).norm();
    const double nr = scale.cwiseProduct(residual(K, x, b)).norm();
    return nb > 0.0 ? nr / nb : nr;
}

Eigen::VectorXd start_vector(Eigen::Index n)
{
    // deterministic, not aligned with any grid mode
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);
    return v.normalized();
}

} // namespace

Eigen::VectorXd multiply(const SparseMatrix& K, const Eigen::VectorXd& x)
{
    if (K.cols() != x.size())
        throw std::invalid_argument("dimension mismatch in matrix-vector product");
    Eigen::VectorXd y(K.rows());
    const auto* outer = K.outerIndexPtr();
    const auto* inner = K.innerIndexPtr();
    const auto* values = K.valuePtr();
    for (Eigen::Index r = 0; r < K.rows(); ++r)
    {
        double s = 0.0;
        const auto end = K.isCompressed() ? outer[r + 1] : outer[r] + K.innerNonZeroPtr()[r];
        for (auto k = outer[r]; k < end; ++k)
            s += values[k] * x[inner[k]];
        y[r] = s;
    }
    return y;
}

double symmetry_defect(const SparseMatrix& K)
{
    const SparseMatrix T = K.transpose();
    const double scale = K.coeffs().cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    const SparseMatrix D = K - T;
    return D.nonZeros() == 0 ? 0.0 : D.coeffs().cwiseAbs().maxCoeff() / scale;
}

struct LinearSolver::Impl
{
    SparseMatrix K;
    Eigen::VectorXd scale; // symmetric Jacobi equilibration for the direct paths
    SolveOptions options;
    bool indefinite = false;
    mutable double last_residual = std::nan("");
    std::optional<Eigen::SimplicialLDLT<ColMajor>> ldlt;
    std::optional<Eigen::SparseLU<ColMajor>> lu;
    std::optional<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                           Eigen::DiagonalPreconditioner<double>>>
        cg;

    Eigen::VectorXd direct(const Eigen::VectorXd& r) const
    {
        const Eigen::VectorXd sr = scale.cwiseProduct(r);
        return scale.cwiseProduct(ldlt ? Eigen::VectorXd(ldlt->solve(sr)) : Eigen::VectorXd(lu->solve(sr)));
    }
};

LinearSolver::LinearSolver(const SparseMatrix& K, SolveOptions options)
    : impl_(std::make_unique<Impl>()), method_(options.method)
{
    if (K.rows() != K.cols())
        throw std::invalid_argument("solver requires a square matrix");
    impl_->K = K;
    impl_->options = options;
    if (options.method == SolveMethod::Direct)
    {
        // derivative dofs in physical units spread the diagonal over many decades
        impl_->scale = K.diagonal().cwiseAbs().cwiseSqrt().cwiseInverse();
        for (Eigen::Index i = 0; i < K.rows(); ++i)
            if (!std::isfinite(impl_->scale[i]))
                impl_->scale[i] = 1.0;
        const auto S = impl_->scale.asDiagonal();
        const ColMajor scaled = S * ColMajor(K) * S;
        impl_->ldlt.emplace(scaled);
        bool ok = impl_->ldlt->info() == Eigen::Success && (impl_->ldlt->vectorD().array() > 0.0).all();
        if (!ok)
        {
            impl_->ldlt.reset();
            impl_->indefinite = true;
            if (options.allow_indefinite)
            {
                // pivoting LU is stable where LDL^T without pivoting is not
                impl_->lu.emplace();
                impl_->lu->analyzePattern(scaled);
                impl_->lu->factorize(scaled);
                if (impl_->lu->info() != Eigen::Success)
                    throw SolveError("sparse LU factorization failed", std::nan(""));
            }
            else if (!options.fallback)
                throw SolveError("direct factorization broke down", std::nan(""));
            else
                method_ = SolveMethod::ConjugateGradient;
        }
    }
    if (method_ == SolveMethod::ConjugateGradient)
    {
        impl_->cg.emplace();
        impl_->cg->setTolerance(options.cg_tolerance);
        impl_->cg->setMaxIterations(std::max<Eigen::Index>(1, options.cg_max_factor * K.rows()));
        impl_->cg->compute(impl_->K);
    }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

bool LinearSolver::indefinite() const { return impl_->indefinite; }

double LinearSolver::last_residual() const { return impl_->last_residual; }

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) const
{
    if (b.size() != impl_->K.rows())
        throw std::invalid_argument("right-hand side dimension mismatch");
    if (b.squaredNorm() == 0.0)
        return Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd x;
    if (impl_->ldlt || impl_->lu)
    {
        const auto& S = impl_->scale;
        x = impl_->direct(b);
        double res = scaled_residual(impl_->K, S, x, b);
        // iterative refinement for ill-conditioned systems
        for (int it = 0; it < 10 && res > 1e-14; ++it)
        {
            const Eigen::VectorXd y = x + impl_->direct(residual(impl_->K, x, b));
            const double r = scaled_residual(impl_->K, S, y, b);
            if (!(r < res))
                break;
            x = y;
            res = r;
        }
        impl_->last_residual = res;
        if (!std::isfinite(res) || res > impl_->options.residual_tolerance)
            throw SolveError("direct solve residual too large", res);
        return x;
    }
    x = impl_->cg->solve(b);
    const double res = relative_residual(impl_->K, x, b);
    impl_->last_residual = res;
    if (impl_->cg->info() != Eigen::Success || !(res < impl_->options.residual_tolerance))
        throw SolveError("conjugate gradient did not converge", res);
    return x;
}

Eigen::VectorXd solve(const SparseMatrix& K, const Eigen::VectorXd& b, SolveOptions options)
{
    return LinearSolver(K, options).solve(b);
}

ConditionEstimate estimate_condition(const SparseMatrix& K, ConditionOptions options)
{
    if (K.rows() != K.cols() || K.rows() == 0)
        throw std::invalid_argument("condition estimate requires a nonempty square matrix");
    ConditionEstimate est;

    // |lambda|_max via ||K v|| on the normalized iterate
    Eigen::VectorXd v = start_vector(K.rows());
    double prev = 0.0;
    for (int it = 1; it <= options.max_iterations; ++it)
    {
        Eigen::VectorXd w = multiply(K, v);
        const double lam = w.norm();
        if (!(lam > 0.0) || !std::isfinite(lam))
            throw std::runtime_error("power iteration broke down");
        v = w / lam;
        est.lambda_max = lam;
        est.iterations_max = it;
        if (it > 1 && std::abs(lam - prev) <= options.tolerance * lam)
            break;
        prev = lam;
    }

    SolveOptions so;
    so.fallback = false;
    so.allow_indefinite = options.allow_indefinite;
    // inverse iteration only needs the direction of K^{-1} v; near-singular
    // matrices still give a usable (lower) bound on the condition number
    so.residual_tolerance = std::numeric_limits<double>::infinity();
    LinearSolver inverse(K, so);
    v = start_vector(K.rows());
    prev = 0.0;
    for (int it = 1; it <= options.max_iterations; ++it)
    {
        Eigen::VectorXd w = inverse.solve(v);
        const double mu = w.norm();
        if (!(mu > 0.0) || !std::isfinite(mu))
            throw std::runtime_error("inverse power iteration broke down");
        v = w / mu;
        est.lambda_min = 1.0 / mu;
        est.iterations_min = it;
        if (it > 1 && std::abs(mu - prev) <= options.tolerance * mu)
            break;
        prev = mu;
    }
    est.cond = est.lambda_max / est.lambda_min;
    return est;
}

} // namespace cutfem
