#include "l0fgl/kernels.hpp"

#include <utility>

#include <omp.h>

namespace l0fgl::kernels {

namespace {

// Below this many row-factor touches the fork/join cost dominates.
constexpr long kParallelWork = 1 << 14;

bool worth_parallel(const Dataset& data, long factor_passes) {
    return static_cast<long>(data.n()) * factor_passes > kParallelWork;
}

}  // namespace

VectorXd linear_predictor(const Dataset& data, const VectorXd& beta) {
    const int n = data.n();
    const int J = data.schema.num_factors();
    VectorXd eta(n);
#pragma omp parallel for schedule(static) if (worth_parallel(data, J))
    for (int i = 0; i < n; ++i) {
        double acc = beta[0];
        for (int j = 0; j < J; ++j) {
            const int col = data.active(i, j);
            if (col >= 0) acc += beta[col];
        }
        eta[i] = acc;
    }
    return eta;
}

VectorXd transpose_times(const Dataset& data, const VectorXd& v) {
    const int n = data.n();
    const int J = data.schema.num_factors();
    VectorXd out = VectorXd::Zero(data.schema.num_columns());
    out[0] = v.sum();
    // Factors own disjoint column ranges.
#pragma omp parallel for schedule(dynamic) if (worth_parallel(data, J))
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < n; ++i) {
            const int col = data.active(i, j);
            if (col >= 0) out[col] += v[i];
        }
    }
    return out;
}

MatrixXd weighted_gram(const Dataset& data, const VectorXd& w) {
    const int n = data.n();
    const int J = data.schema.num_factors();
    const int m = data.schema.num_columns();
    MatrixXd G = MatrixXd::Zero(m, m);

    // Factor index -1 stands for the intercept. Each (a, b) pair with a <= b
    // writes only to its own block of the upper triangle.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve((J + 1) * (J + 2) / 2);
    for (int a = -1; a < J; ++a)
        for (int b = a; b < J; ++b) pairs.emplace_back(a, b);

    const int npairs = static_cast<int>(pairs.size());
#pragma omp parallel for schedule(dynamic, 8) if (worth_parallel(data, npairs))
    for (int k = 0; k < npairs; ++k) {
        const auto [a, b] = pairs[k];
        if (a == -1 && b == -1) {
            G(0, 0) = w.sum();
            continue;
        }
        for (int i = 0; i < n; ++i) {
            const int cb = data.active(i, b);
            if (cb < 0) continue;
            const int ca = a == -1 ? 0 : data.active(i, a);
            if (ca < 0) continue;
            G(ca, cb) += w[i];
        }
    }
    return G.selfadjointView<Eigen::Upper>();
}

VectorXd block_weight_sums(const Dataset& data, int j, const VectorXd& w) {
    const int start = data.schema.start(j);
    VectorXd sums = VectorXd::Zero(data.schema.block_size(j));
    for (int i = 0; i < data.n(); ++i) {
        const int col = data.active(i, j);
        if (col >= 0) sums[col - start] += w[i];
    }
    return sums;
}

namespace reference {

VectorXd linear_predictor(const Dataset& data, const VectorXd& beta) {
    const int n = data.n();
    const int m = static_cast<int>(data.X.cols());
    VectorXd eta(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < m; ++c) acc += data.X(i, c) * beta[c];
        eta[i] = acc;
    }
    return eta;
}

VectorXd transpose_times(const Dataset& data, const VectorXd& v) {
    const int n = data.n();
    const int m = static_cast<int>(data.X.cols());
    VectorXd out = VectorXd::Zero(m);
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < n; ++i) out[c] += data.X(i, c) * v[i];
    return out;
}

MatrixXd weighted_gram(const Dataset& data, const VectorXd& w) {
    const int n = data.n();
    const int m = static_cast<int>(data.X.cols());
    MatrixXd G = MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += data.X(i, a) * w[i] * data.X(i, b);
            G(a, b) = acc;
            G(b, a) = acc;
        }
    return G;
}

}  // namespace reference

}  // namespace l0fgl::kernels
