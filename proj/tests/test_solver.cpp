#include "cutfem/solver.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace cutfem;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& A) { return A.sparseView(); }

// 2D five-point Laplacian on an m x m grid plus a small shift
SparseMatrix laplacian_2d(int m, double shift)
{
    std::vector<Eigen::Triplet<double>> t;
    auto id = [m](int i, int j) { return i + m * j; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
        {
            t.emplace_back(id(i, j), id(i, j), 4.0 + shift);
            if (i > 0)
                t.emplace_back(id(i, j), id(i - 1, j), -1.0);
            if (i + 1 < m)
                t.emplace_back(id(i, j), id(i + 1, j), -1.0);
            if (j > 0)
                t.emplace_back(id(i, j), id(i, j - 1), -1.0);
            if (j + 1 < m)
                t.emplace_back(id(i, j), id(i, j + 1), -1.0);
        }
    SparseMatrix K(m * m, m * m);
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

} // namespace

TEST(Solve, Identity)
{
    const SparseMatrix I = from_dense(Eigen::MatrixXd::Identity(5, 5));
    const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(5, 0);
    EXPECT_EQ(solve(I, e1), e1);
}

TEST(Solve, TwoByTwo)
{
    Eigen::MatrixXd A(2, 2);
    A << 2, 1, 1, 2;
    const auto x = solve(from_dense(A), Eigen::Vector2d(3, 3));
    EXPECT_NEAR((x - Eigen::Vector2d(1, 1)).norm(), 0.0, 1e-15);
    SolveOptions cg;
    cg.method = SolveMethod::ConjugateGradient;
    EXPECT_NEAR((solve(from_dense(A), Eigen::Vector2d(3, 3), cg) - Eigen::Vector2d(1, 1)).norm(), 0.0, 1e-12);
}

TEST(Solve, DirectAgreesWithConjugateGradient)
{
    const SparseMatrix K = laplacian_2d(32, 0.01);
    std::mt19937 rng(1);
    std::normal_distribution<double> n;
    Eigen::VectorXd b(K.rows());
    for (auto& x : b)
        x = n(rng);
    SolveOptions cg;
    cg.method = SolveMethod::ConjugateGradient;
    const auto xd = solve(K, b);
    const auto xc = solve(K, b, cg);
    EXPECT_LT((xd - xc).norm() / xd.norm(), 1e-9);
    EXPECT_LT((multiply(K, xd) - b).norm() / b.norm(), 1e-13);
}

TEST(Solve, FactorizeOnceSolveMany)
{
    const SparseMatrix K = laplacian_2d(10, 0.5);
    LinearSolver s(K);
    EXPECT_EQ(s.method(), SolveMethod::Direct);
    EXPECT_FALSE(s.indefinite());
    for (int k = 0; k < 3; ++k)
    {
        const Eigen::VectorXd b = Eigen::VectorXd::Unit(K.rows(), k);
        EXPECT_LT((multiply(K, s.solve(b)) - b).norm(), 1e-13);
        EXPECT_LT(s.last_residual(), 1e-14);
    }
    EXPECT_THROW(s.solve(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Solve, IndefiniteNeedsPermission)
{
    Eigen::MatrixXd A(2, 2);
    A << 1, 2, 2, 1;
    SolveOptions strict;
    strict.fallback = false;
    EXPECT_THROW(solve(from_dense(A), Eigen::Vector2d(3, 3), strict), SolveError);
    SolveOptions ok;
    ok.allow_indefinite = true;
    LinearSolver s(from_dense(A), ok);
    EXPECT_TRUE(s.indefinite());
    EXPECT_NEAR((s.solve(Eigen::Vector2d(3, 3)) - Eigen::Vector2d(1, 1)).norm(), 0.0, 1e-14);
}

TEST(Solve, ConjugateGradientFailureCarriesResidual)
{
    Eigen::MatrixXd A(2, 2);
    A << 1, 0, 0, -1;
    SolveOptions cg;
    cg.method = SolveMethod::ConjugateGradient;
    cg.cg_max_factor = 1;
    try
    {
        solve(from_dense(A), Eigen::Vector2d(1, 1), cg);
        FAIL();
    }
    catch (const SolveError& e)
    {
        EXPECT_TRUE(std::isnan(e.residual()) || e.residual() > 0.0);
    }
}

TEST(Solve, RejectsNonSquare)
{
    SparseMatrix K(2, 3);
    EXPECT_THROW(LinearSolver{K}, std::invalid_argument);
}

TEST(Condition, IdentityAndDiagonal)
{
    EXPECT_NEAR(estimate_condition(from_dense(Eigen::MatrixXd::Identity(4, 4))).cond, 1.0, 1e-6);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 10;
    const auto c = estimate_condition(from_dense(D));
    EXPECT_NEAR(c.cond, 10.0, 1e-6);
    EXPECT_NEAR(c.lambda_max, 10.0, 1e-6);
    EXPECT_NEAR(c.lambda_min, 1.0, 1e-6);
}

TEST(Condition, MatchesDenseEigenvalues)
{
    const SparseMatrix K = laplacian_2d(8, 0.1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(K)};
    ConditionOptions o;
    o.max_iterations = 5000;
    o.tolerance = 1e-12;
    const auto c = estimate_condition(K, o);
    const auto ev = es.eigenvalues();
    EXPECT_NEAR(c.cond, ev.maxCoeff() / ev.minCoeff(), 1e-3 * ev.maxCoeff() / ev.minCoeff());
}

TEST(Multiply, DenseOracle)
{
    std::mt19937 rng(6);
    std::normal_distribution<double> n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(30, 30);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j)
            if (rng() % 4 == 0)
                A(i, j) = n(rng);
    Eigen::VectorXd x(30);
    for (auto& v : x)
        v = n(rng);
    EXPECT_LT((multiply(from_dense(A), x) - A * x).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_THROW(multiply(from_dense(A), Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Multiply, SymmetryDefect)
{
    Eigen::MatrixXd A(2, 2);
    A << 2, 1, 0.5, 4;
    EXPECT_DOUBLE_EQ(symmetry_defect(from_dense(A)), 0.5 / 4.0);
    EXPECT_EQ(symmetry_defect(laplacian_2d(4, 0)), 0.0);
}
