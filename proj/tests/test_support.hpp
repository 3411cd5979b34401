#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "l0fgl/data_model.hpp"
#include "l0fgl/likelihood.hpp"
#include "l0fgl/rng.hpp"

namespace l0fgl::testutil {

/// Random levels with equal probabilities and a logistic response drawn from
/// `beta` (or from random coefficients of size `scale` when beta is empty).
inline Dataset random_dataset(const std::vector<FactorSpec>& factors, int n, std::uint64_t seed,
                              double scale = 0.8, VectorXd beta = {}) {
    ModelSchema schema(factors);
    CounterRng rng(seed, 0, Stream::train_levels);
    CounterRng yrng(seed, 0, Stream::train_response);
    if (beta.size() == 0) {
        beta = VectorXd(schema.num_columns());
        for (int i = 0; i < beta.size(); ++i) beta[i] = rng.uniform(-scale, scale);
    }
    RowMajorMatrixXi levels(n, schema.num_factors());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < schema.num_factors(); ++j)
            levels(i, j) = static_cast<int>(rng.below(schema.factor(j).num_levels));
    Dataset data = encode(levels, schema, VectorXd::Zero(n));
    const VectorXd eta = data.X * beta;
    for (int i = 0; i < n; ++i) data.y[i] = yrng.bernoulli(logistic(eta[i])) ? 1.0 : 0.0;
    return data;
}

inline std::vector<FactorSpec> mixed_factors() {
    return {{"a", 4, Scale::nominal}, {"b", 3, Scale::ordinal}, {"c", 5, Scale::ordinal}};
}

inline VectorXd random_vector(int size, CounterRng& rng, double lo = -1.0, double hi = 1.0) {
    VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = rng.uniform(lo, hi);
    return v;
}

/// Fourth-order central differences.
inline VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x,
                            double h = 1e-4) {
    VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        VectorXd a = x, b = x, c = x, d = x;
        a[i] += 2 * h;
        b[i] += h;
        c[i] -= h;
        d[i] -= 2 * h;
        g[i] = (-f(a) + 8 * f(b) - 8 * f(c) + f(d)) / (12 * h);
    }
    return g;
}

inline double fd_derivative(const std::function<double(double)>& f, double x, double h = 1e-4) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

/// max |a - b| / max(|b|_inf, floor)
inline double rel_error(const VectorXd& a, const VectorXd& b, double floor = 1e-8) {
    return (a - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), floor);
}

inline double rel_error(double a, double b, double floor = 1e-8) {
    return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace l0fgl::testutil
