#pragma once

#include <functional>

#include <Eigen/Dense>

namespace l0fgl {

/// Returns f(x) and, when `grad` is non-null, writes the gradient into it.
using SmoothObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsSettings {
    double grad_tol = 1e-6;  // stop when ||grad||_inf <= grad_tol
    int max_iter = 100;
    double c1 = 1e-4;        // sufficient decrease
    double c2 = 0.9;         // curvature
    int max_line_search = 40;
};

struct BfgsResult {
    Eigen::VectorXd x;  // best iterate seen
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
};

/// Dense BFGS with a strong-Wolfe line search.
BfgsResult bfgs_minimize(const SmoothObjective& f, Eigen::VectorXd x0, const BfgsSettings& settings = {});

}  // namespace l0fgl
