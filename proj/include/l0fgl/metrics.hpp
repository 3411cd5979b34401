#pragma once

#include <optional>
#include <utility>

#include "l0fgl/data_model.hpp"

namespace l0fgl {

/// A rate whose denominator can be empty; empty means undefined, not zero.
using Rate = std::optional<double>;

struct EvalReport {
    double msec = 0.0;
    std::optional<double> pred_deviance;
    Rate fp_sel, fn_sel;
    Rate fp_fus, fn_fus;
    int os = 0;
    int ps = 0;
};

/// (1/p) sum over the non-intercept coefficients of (truth - estimate)^2.
double msec(const CoefVector& beta_hat, const CoefVector& beta_star);

/// Factor selection rates: FP over truly null factors, FN over truly active ones.
std::pair<Rate, Rate> selection_rates(const CoefVector& beta_hat, const CoefVector& beta_star);

/// Fusion rates over truly influential factors. Nominal factors compare all
/// level pairs, ordinal factors adjacent levels; level 0 enters as 0.
/// Equality is exact, so smooth-surrogate solutions must be thresholded first.
std::pair<Rate, Rate> fusion_rates(const CoefVector& beta_hat, const CoefVector& beta_star,
                                   const ModelSchema& schema);

/// (overall sparsity, practical sparsity).
std::pair<int, int> sparsity(const CoefVector& beta_hat, const ModelSchema& schema);

/// -2 sum y log mu + (1 - y) log(1 - mu), mu clamped to [1e-12, 1 - 1e-12].
double predictive_deviance(const VectorXd& beta, const Dataset& heldout);

EvalReport evaluate(const CoefVector& beta_hat, const CoefVector& beta_star,
                    const ModelSchema& schema, const Dataset* test = nullptr);

}  // namespace l0fgl
