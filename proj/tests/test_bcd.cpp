#include <gtest/gtest.h>

#include "l0fgl/bcd.hpp"
#include "l0fgl/likelihood.hpp"
#include "test_support.hpp"

using namespace l0fgl;

namespace {

PenaltyConfig lambdas(double l1, double l0) {
    PenaltyConfig cfg;
    cfg.lambda1 = l1;
    cfg.lambda0 = l0;
    return cfg;
}

struct Frozen {
    Dataset data;
    WeightSet ws;
    CoefVector beta_k;
    WorkingResponse wr;
};

Frozen frozen_state(std::uint64_t seed) {
    Frozen f{testutil::random_dataset(testutil::mixed_factors(), 250, seed), {}, {}, {}};
    f.ws = weights_plain(f.data);
    CounterRng rng(seed, 1, Stream::folds);
    f.beta_k = CoefVector(f.data.schema, testutil::random_vector(f.data.schema.num_columns(), rng, -0.7, 0.7));
    f.wr = working_response(f.beta_k, f.data);
    return f;
}

}  // namespace

TEST(BlockSurrogate, ClosedFormMatchesDirectEvaluation) {
    const auto cfg = lambdas(0.3, 0.05);
    for (std::uint64_t seed : {51u, 52u, 53u}) {
        const auto f = frozen_state(seed);
        const VectorXd residual = f.wr.y_tilde - f.data.X * f.beta_k.flat();
        CounterRng rng(seed, 2, Stream::folds);
        for (int j = 0; j < f.data.schema.num_factors(); ++j) {
            const VectorXd frozen = f.beta_k.block(j);
            const auto s = block_surrogate(f.data, j, frozen, frozen, residual, f.wr.w, cfg, f.ws);
            for (int k = 0; k < 20; ++k) {
                const VectorXd b = testutil::random_vector(f.data.schema.block_size(j), rng, -2, 2);
                const double direct = approx_g(b, f.beta_k, j, f.data, cfg, f.ws);
                EXPECT_NEAR(s.value(b), direct, 1e-10 * (1 + std::abs(direct)));
            }
        }
    }
}

// Substituting b = beta_k_j gives the weighted residual sum of squares of the
// IRLS expansion plus the smooth L0 term plus b^T A b.
TEST(BlockSurrogate, SubstitutionAtFrozenBlock) {
    const auto cfg = lambdas(0, 0.4);
    const auto f = frozen_state(54);
    const VectorXd resid = f.wr.y_tilde - f.data.X * f.beta_k.flat();
    const double rss = resid.dot(f.wr.w.cwiseProduct(resid)) / (2.0 * f.data.n());
    for (int j = 0; j < f.data.schema.num_factors(); ++j) {
        const VectorXd b = f.beta_k.block(j);
        const MatrixXd A = build_A_lambda_j(b, j, cfg, f.ws, f.data.schema);
        double l0 = 0.0;
        for (const auto& pw : f.ws.w0[j])
            l0 += pw.weight * l0_smooth(f.beta_k.level(j, pw.pair.r) - f.beta_k.level(j, pw.pair.s), cfg.gamma);
        EXPECT_NEAR(approx_g(b, f.beta_k, j, f.data, cfg, f.ws), rss + cfg.lambda0 * l0 + b.dot(A * b), 1e-12);
    }
}

TEST(BlockSurrogate, GradientMatchesFiniteDifferences) {
    const auto cfg = lambdas(0, 0.7);
    const auto f = frozen_state(55);
    const VectorXd residual = f.wr.y_tilde - f.data.X * f.beta_k.flat();
    CounterRng rng(55, 3, Stream::folds);
    for (int j = 0; j < f.data.schema.num_factors(); ++j) {
        const VectorXd frozen = f.beta_k.block(j);
        const auto s = block_surrogate(f.data, j, frozen, frozen, residual, f.wr.w, cfg, f.ws);
        const VectorXd b = testutil::random_vector(f.data.schema.block_size(j), rng);
        const auto g = [&](const VectorXd& v) { return approx_g(v, f.beta_k, j, f.data, cfg, f.ws); };
        EXPECT_LT(testutil::rel_error(s.grad(b), testutil::fd_gradient(g, b)), 1e-6);
    }
}

TEST(InnerQuasiNewton, SolvesQuadratic) {
    MatrixXd Q(3, 3);
    Q << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 0.5;
    const VectorXd lin = (VectorXd(3) << 1, -1, 0.25).finished();
    const SmoothObjective obj = [&](const VectorXd& b, VectorXd* g) {
        if (g) *g = Q * b - lin;
        return 0.5 * b.dot(Q * b) - lin.dot(b);
    };
    InnerSettings s;
    s.tol = 1e-10;
    const auto r = inner_quasi_newton(obj, VectorXd::Zero(3), s, false);
    EXPECT_TRUE(r.converged);
    EXPECT_LT((r.block - Q.ldlt().solve(lin)).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(InnerQuasiNewton, SnapsTinySolutionToZero) {
    const SmoothObjective obj = [](const VectorXd& b, VectorXd* g) {
        const VectorXd target = VectorXd::Constant(2, 1e-6);
        if (g) *g = b - target;
        return 0.5 * (b - target).squaredNorm();
    };
    const auto r = inner_quasi_newton(obj, VectorXd::Ones(2), InnerSettings{});
    EXPECT_TRUE(r.snapped);
    EXPECT_TRUE(r.block.isZero(0));
}

// A one-parameter factor reduces the block problem to a scalar, whose exact
// minimizer is located on a fine grid.
TEST(InnerQuasiNewton, OneDimensionalBlockMatchesGridSearch) {
    const auto data = testutil::random_dataset({{"a", 2, Scale::nominal}, {"b", 3, Scale::nominal}}, 300, 56);
    const auto ws = weights_plain(data);
    const auto cfg = lambdas(0.01, 0.0);
    const CoefVector beta_k(data.schema, (VectorXd(4) << 0.1, 0.4, -0.2, 0.3).finished());
    const auto wr = working_response(beta_k, data);
    const VectorXd residual = wr.y_tilde - data.X * beta_k.flat();
    const auto s = block_surrogate(data, 0, beta_k.block(0), beta_k.block(0), residual, wr.w, cfg, ws);
    const double group = cfg.lambda1 * ws.w1[0];
    auto exact = [&](double b) {
        const VectorXd v = VectorXd::Constant(1, b);
        return s.value(v) + group * std::abs(b);
    };
    double best = 0.0, best_value = exact(0.0);
    for (int i = -400000; i <= 400000; ++i) {
        const double b = i * 1e-5;
        if (exact(b) < best_value) best_value = exact(b), best = b;
    }
    const SmoothObjective smoothed = [&](const VectorXd& b, VectorXd* g) {
        const double norm = std::sqrt(b.squaredNorm() + 1e-8);
        if (g) *g = s.grad(b) + (group / norm) * b;
        return s.value(b) + group * norm;
    };
    const auto r = inner_quasi_newton(smoothed, beta_k.block(0), InnerSettings{});
    EXPECT_NEAR(r.block[0], best, 1e-4);
}

TEST(Bcd, HugeGroupPenaltyGivesNullModel) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 300, 57);
    const auto fit = bcd_fit(data, lambdas(1e3, 0), weights_plain(data));
    ASSERT_FALSE(fit.failed);
    for (int j = 0; j < data.schema.num_factors(); ++j) EXPECT_TRUE(fit.beta.block(j).isZero(0));
}

TEST(Bcd, ZeroPenaltyMatchesMl) {
    const auto data = testutil::random_dataset(testutil::mixed_factors(), 800, 58);
    const auto ml = fit_ml(data);
    ASSERT_FALSE(ml.failed);
    BcdSettings s;
    s.tol = 1e-8;
    s.max_steps = 2000;
    const auto fit = bcd_fit(data, lambdas(0, 0), weights_plain(data), s);
    ASSERT_FALSE(fit.failed);
    EXPECT_TRUE(fit.converged);
    EXPECT_LT((fit.beta.flat() - ml.beta.flat()).lpNorm<Eigen::Infinity>(), 1e-3);
}

// Each block update never raises the nonsmooth surrogate it minimizes, so
// one outer step from beta_k cannot raise g(., beta_k) + group penalty summed
// over the blocks when evaluated block by block.
TEST(Bcd, SingleStepDoesNotIncreaseSurrogate) {
    const auto cfg = lambdas(0.05, 0.02);
    for (std::uint64_t seed : {59u, 60u, 61u}) {
        const auto f = frozen_state(seed);
        BcdSettings s;
        s.max_steps = 1;
        s.eps_fuse = s.eps_zero = 1e-14;
        const VectorXd start = f.beta_k.flat();
        const auto fit = bcd_fit(f.data, cfg, f.ws, s, &start);
        ASSERT_FALSE(fit.failed);
        const auto total = [&](const CoefVector& beta) {
            const VectorXd resid = f.wr.y_tilde - f.data.X * beta.flat();
            double v = resid.dot(f.wr.w.cwiseProduct(resid)) / (2.0 * f.data.n());
            for (int j = 0; j < f.data.schema.num_factors(); ++j) {
                const MatrixXd A = build_A_lambda_j(f.beta_k.block(j), j, cfg, f.ws, f.data.schema);
                v += 0.5 * beta.block(j).dot(A * beta.block(j)) + cfg.lambda1 * f.ws.w1[j] * beta.block(j).norm();
            }
            return v;
        };
        EXPECT_LE(total(fit.beta), total(f.beta_k) + 1e-12);
    }
}

TEST(Bcd, ConstantResponseIsUnconvergedNotFailed) {
    auto data = testutil::random_dataset(testutil::mixed_factors(), 60, 62);
    data.y.setOnes();
    const auto fit = bcd_fit(data, lambdas(0.1, 0.1), weights_plain(data));
    EXPECT_FALSE(fit.failed);
    EXPECT_FALSE(fit.converged);
    EXPECT_TRUE(fit.beta.flat().allFinite());
    EXPECT_NE(fit.note.find("constant"), std::string::npos);
}

TEST(Bcd, SettingsValidation) {
    BcdSettings s;
    s.nu = 0.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.inner.c_inner = 0.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}
