#pragma once

#include "l0fgl/bfgs.hpp"
#include "l0fgl/data_model.hpp"
#include "l0fgl/fit_result.hpp"
#include "l0fgl/penalty.hpp"
#include "l0fgl/pirls.hpp"
#include "l0fgl/threshold.hpp"

namespace l0fgl {

struct InnerSettings {
    double tol = 1e-6;       // gradient max-norm of the smoothed block objective
    int max_iter = 100;
    double c_inner = 1e-8;   // ||b||_2 is replaced by sqrt(b^T b + c_inner)
};

struct BcdSettings {
    double tol = 1e-5;       // stop when ||beta_k - beta_{k-1}||_inf <= tol
    int max_steps = 250;
    InnerSettings inner;
    StartValue start = StartValue::zero;
    double nu = 1.0;         // block damping, b_j <- (1 - nu) b_j + nu argmin
    double eps_fuse = kDefaultFuseEps;
    double eps_zero = kDefaultZeroEps;

    void validate() const;
};

/// The quadratic part of the block surrogate g(b, beta_k) for one factor,
/// with working response, weights and A_lambda_j frozen at beta_k:
///
///   g(b) = 1/2 b^T Q b - lin^T b + constant.
struct BlockSurrogate {
    MatrixXd Q;
    VectorXd lin;
    double constant = 0.0;

    double value(const VectorXd& b) const { return 0.5 * b.dot(Q * b) - lin.dot(b) + constant; }
    VectorXd grad(const VectorXd& b) const { return Q * b - lin; }
};

/// g(b, beta_k) evaluated directly:
///
///   1/(2n) (y~ - X beta)^T W (y~ - X beta) + P_L0(beta_k_j)
///     + 1/2 (b^T A b + beta_k_j^T A beta_k_j)
///
/// where beta is beta_k with block j replaced by `block`, and P_L0 is the
/// smooth L0 term. Throws DegenerateWeightsError like working_response.
double approx_g(const VectorXd& block, const CoefVector& beta_k, int j, const Dataset& data,
                const PenaltyConfig& cfg, const WeightSet& weights);

/// Same surrogate assembled in closed form. `residual` is y~ - X beta for the
/// current coefficients (block j included), `w` the frozen IRLS weights and
/// `frozen_block` the value of block j at beta_k.
BlockSurrogate block_surrogate(const Dataset& data, int j, const VectorXd& current_block,
                               const VectorXd& frozen_block, const VectorXd& residual,
                               const VectorXd& w, const PenaltyConfig& cfg,
                               const WeightSet& weights);

struct InnerResult {
    VectorXd block;
    bool converged = false;
    bool line_search_failed = false;
    bool snapped = false;
};

/// BFGS on `objective` from `start`. When `snap_to_zero` is set, a solution
/// with norm below 10 sqrt(c_inner) is replaced by exact zero.
InnerResult inner_quasi_newton(const SmoothObjective& objective, const VectorXd& start,
                               const InnerSettings& settings, bool snap_to_zero = true);

/// Block coordinate descent on the 1/n-scaled objective. Every outer step
/// refreshes (y~, W, A_lambda) at the current beta, updates the intercept in
/// closed form, then cycles the factors, minimizing
///
///   g(b, beta_k) + lambda1 w1_j ||b||_2
///
/// by quasi-Newton and installing each block immediately. Only non-finite
/// iterates fail. When the working weights degenerate (separated data or a
/// constant response) the last finite iterate is returned unconverged.
FitResult bcd_fit(const Dataset& data, const PenaltyConfig& cfg, const WeightSet& weights,
                  const BcdSettings& settings = {}, const VectorXd* initial = nullptr);

}  // namespace l0fgl
