#include <gtest/gtest.h>

#include <cmath>

#include "l0fgl/likelihood.hpp"
#include "l0fgl/metrics.hpp"
#include "l0fgl/simulation.hpp"
#include "test_support.hpp"

using namespace l0fgl;

namespace {

Dataset intercept_only(int n, int ones) {
    ModelSchema schema({{"a", 2, Scale::nominal}});
    RowMajorMatrixXi levels = RowMajorMatrixXi::Zero(n, 1);
    VectorXd y = VectorXd::Zero(n);
    y.head(ones).setOnes();
    return encode(levels, schema, y);
}

}  // namespace

TEST(LogLikelihood, ZeroBetaIsMinusNLog2) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 123, 1);
    EXPECT_NEAR(log_likelihood(VectorXd::Zero(data.schema.num_columns()), data), -123 * std::log(2.0), 1e-10);
}

TEST(LogLikelihood, SingleObservation) {
    const auto data = intercept_only(1, 1);
    EXPECT_NEAR(log_likelihood(VectorXd::Zero(2), data), -0.693147, 1e-6);
}

TEST(LogLikelihood, PerfectFitApproachesZeroFromBelow) {
    const auto data = intercept_only(5, 5);
    double previous = -1.0;
    for (double b0 : {5.0, 20.0, 40.0, 400.0}) {
        const double ll = log_likelihood((VectorXd(2) << b0, 0).finished(), data);
        EXPECT_LE(ll, 0.0);
        EXPECT_GE(ll, previous);
        EXPECT_TRUE(std::isfinite(ll));
        previous = ll;
    }
    EXPECT_GT(previous, -1e-100);
}

TEST(Softplus, StableForLargeArguments) {
    EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(softplus(800.0), 800.0);
    EXPECT_GT(softplus(-800.0), -1e-300);
    EXPECT_NEAR(softplus(-40.0), std::exp(-40.0), 1e-30);
}

TEST(Gradient, InterceptComponentAtZero) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 200, 2);
    const VectorXd g = gradient(VectorXd::Zero(data.schema.num_columns()), data);
    EXPECT_NEAR(g[0], data.y.sum() - 100.0, 1e-12);
}

TEST(Gradient, MatchesFiniteDifferences) {
    CounterRng rng(77, 0, Stream::folds);
    for (int draw = 0; draw < 100; ++draw) {
        const auto data = testutil::random_dataset(testutil::mixed_factors(), 60 + draw, 1000 + draw);
        const VectorXd beta = testutil::random_vector(data.schema.num_columns(), rng, -1.5, 1.5);
        const auto f = [&](const VectorXd& b) { return log_likelihood(b, data); };
        ASSERT_LT(testutil::rel_error(gradient(beta, data), testutil::fd_gradient(f, beta)), 1e-6) << "draw " << draw;
    }
}

TEST(Hessian, ClosedFormAndFiniteDifferencesOfGradient) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 150, 4);
    CounterRng rng(4, 0, Stream::folds);
    const VectorXd beta = testutil::random_vector(data.schema.num_columns(), rng);
    const MatrixXd H = hessian(beta, data);
    const auto s = LikelihoodState::at(data, beta);
    const MatrixXd expected = -(data.X.transpose() * s.w.asDiagonal() * data.X);
    EXPECT_LT((H - expected).lpNorm<Eigen::Infinity>(), 1e-10);
    for (int k = 0; k < beta.size(); ++k) {
        const auto f = [&](const VectorXd& b) { return gradient(b, data)[k]; };
        EXPECT_LT(testutil::rel_error(testutil::fd_gradient(f, beta), VectorXd(H.row(k).transpose())), 1e-6);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(H);
    EXPECT_LE(eig.eigenvalues().maxCoeff(), 1e-10);
}

TEST(LogLikelihood, ConcaveAlongRandomChords) {
    CounterRng rng(5, 0, Stream::folds);
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 90, 6);
    for (int k = 0; k < 200; ++k) {
        const VectorXd b1 = testutil::random_vector(data.schema.num_columns(), rng, -3, 3);
        const VectorXd b2 = testutil::random_vector(data.schema.num_columns(), rng, -3, 3);
        const double t = rng.uniform(0.01, 0.99);
        const double mid = log_likelihood(VectorXd(t * b1 + (1 - t) * b2), data);
        EXPECT_GE(mid, t * log_likelihood(b1, data) + (1 - t) * log_likelihood(b2, data) - 1e-10);
    }
}

TEST(WorkingResponse, ValuesAtZero) {
    ModelSchema schema({{"a", 2, Scale::nominal}});
    RowMajorMatrixXi levels = RowMajorMatrixXi::Zero(2, 1);
    const auto data = encode(levels, schema, (VectorXd(2) << 1, 0).finished());
    const auto wr = working_response(VectorXd::Zero(2), data);
    EXPECT_DOUBLE_EQ(wr.y_tilde[0], 2.0);
    EXPECT_DOUBLE_EQ(wr.y_tilde[1], -2.0);
    EXPECT_DOUBLE_EQ(wr.w[0], 0.25);
}

TEST(WorkingResponse, IrlsStepEqualsNewtonStep) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 300, 8);
    const int m = data.schema.num_columns();
    const auto wr = working_response(VectorXd::Zero(m), data);
    const MatrixXd XtWX = data.X.transpose() * wr.w.asDiagonal() * data.X;
    const VectorXd irls = XtWX.ldlt().solve(data.X.transpose() * wr.w.cwiseProduct(wr.y_tilde));
    const VectorXd newton = -hessian(VectorXd::Zero(m), data).ldlt().solve(gradient(VectorXd::Zero(m), data));
    EXPECT_LT((irls - newton).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(WorkingResponse, DegenerateWeightsThrow) {
    const auto data = intercept_only(4, 2);
    EXPECT_THROW(working_response((VectorXd(2) << 40.0, 0).finished(), data), DegenerateWeightsError);
}

TEST(FitMl, InterceptOnlyBalanced) {
    const auto fit = fit_ml(intercept_only(40, 20));
    ASSERT_FALSE(fit.failed);
    EXPECT_NEAR(fit.beta.intercept(), 0.0, 1e-10);
}

TEST(FitMl, InterceptOnlyLogThree) {
    const auto fit = fit_ml(intercept_only(40, 30));
    ASSERT_FALSE(fit.failed);
    EXPECT_NEAR(fit.beta.intercept(), std::log(3.0), 1e-9);
}

TEST(FitMl, ScoreBelowToleranceAtConvergence) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 500, 12);
    const auto fit = fit_ml(data);
    ASSERT_FALSE(fit.failed);
    EXPECT_TRUE(fit.converged);
    EXPECT_LT(gradient(fit.beta, data).lpNorm<Eigen::Infinity>(), MlSettings{}.tol);
    EXPECT_NEAR(fit.objective, -log_likelihood(fit.beta, data), 1e-9);
}

TEST(FitMl, ConstantResponseFails) {
    const auto fit = fit_ml(intercept_only(10, 10));
    EXPECT_TRUE(fit.failed);
    EXPECT_FALSE(fit.failure_reason.empty());
}

TEST(FitMl, IterationLimitIsAFailure) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 200, 13);
    MlSettings settings;
    settings.max_iter = 1;
    EXPECT_TRUE(fit_ml(data, settings).failed);
}

// Monte Carlo check of the ML estimator on B8 data against the asymptotic
// oracle E[MSEC] ~ tr(I(beta*)^-1) / (n p), with the Fisher information per
// observation computed exactly by enumerating all 4^8 level combinations.
TEST(FitMl, B8MsecMatchesFisherInformationOracle) {
    const int n = 1000;
    const auto spec = design_b8(n, 2026);
    const auto& schema = spec.schema;
    const int m = schema.num_columns();
    const int J = schema.num_factors();

    MatrixXd info = MatrixXd::Zero(m, m);
    std::vector<int> lv(J, 0);
    VectorXd x(m);
    for (int cell = 0; cell < (1 << (2 * J)); ++cell) {
        double prob = 1.0;
        x.setZero();
        x[0] = 1.0;
        for (int j = 0; j < J; ++j) {
            lv[j] = (cell >> (2 * j)) & 3;
            prob *= spec.level_probs[j][lv[j]];
            if (lv[j] > 0) x[schema.start(j) + lv[j] - 1] = 1.0;
        }
        const double pi = 1.0 / (1.0 + std::exp(-x.dot(spec.beta_star.flat())));
        info.noalias() += prob * pi * (1 - pi) * x * x.transpose();
    }
    const MatrixXd cov = info.inverse();
    const double expected = cov.diagonal().tail(m - 1).sum() / (n * (m - 1));

    const int reps = 40;
    std::vector<double> values;
    for (int r = 0; r < reps; ++r) {
        const auto fit = fit_ml(simulate_dataset(spec, r).train);
        ASSERT_FALSE(fit.failed);
        values.push_back(msec(fit.beta, spec.beta_star));
    }
    double mean = 0.0, sq = 0.0;
    for (double v : values) mean += v;
    mean /= reps;
    for (double v : values) sq += (v - mean) * (v - mean);
    const double se = std::sqrt(sq / (reps - 1) / reps);
    EXPECT_LT(std::abs(mean - expected), 3 * se) << "mean " << mean << " oracle " << expected;
}
