#include <gtest/gtest.h>

#include "l0fgl/bfgs.hpp"

using namespace l0fgl;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(Bfgs, QuadraticMinimum) {
    MatrixXd Q(3, 3);
    Q << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    const VectorXd b = (VectorXd(3) << 1, -2, 0.5).finished();
    const SmoothObjective f = [&](const VectorXd& x, VectorXd* g) {
        if (g) *g = Q * x - b;
        return 0.5 * x.dot(Q * x) - b.dot(x);
    };
    const auto res = bfgs_minimize(f, VectorXd::Zero(3));
    EXPECT_TRUE(res.converged);
    EXPECT_LT((res.x - Q.ldlt().solve(b)).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Bfgs, Rosenbrock) {
    const SmoothObjective f = [](const VectorXd& x, VectorXd* g) {
        const double a = 1 - x[0], c = x[1] - x[0] * x[0];
        if (g) *g = (VectorXd(2) << -2 * a - 400 * x[0] * c, 200 * c).finished();
        return a * a + 100 * c * c;
    };
    BfgsSettings settings;
    settings.max_iter = 500;
    const auto res = bfgs_minimize(f, (VectorXd(2) << -1.2, 1).finished(), settings);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.x[0], 1.0, 1e-5);
    EXPECT_NEAR(res.x[1], 1.0, 1e-5);
}

TEST(Bfgs, StartAtOptimumReturnsImmediately) {
    const SmoothObjective f = [](const VectorXd& x, VectorXd* g) {
        if (g) *g = 2 * x;
        return x.squaredNorm();
    };
    const auto res = bfgs_minimize(f, VectorXd::Zero(4));
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 0);
}

TEST(Bfgs, IterationLimitReportsNotConverged) {
    const SmoothObjective f = [](const VectorXd& x, VectorXd* g) {
        const double a = 1 - x[0], c = x[1] - x[0] * x[0];
        if (g) *g = (VectorXd(2) << -2 * a - 400 * x[0] * c, 200 * c).finished();
        return a * a + 100 * c * c;
    };
    BfgsSettings settings;
    settings.max_iter = 2;
    const auto res = bfgs_minimize(f, (VectorXd(2) << -1.2, 1).finished(), settings);
    EXPECT_FALSE(res.converged);
    EXPECT_LT(res.value, 24.2);
}
