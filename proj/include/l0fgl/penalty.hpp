#pragma once

#include <vector>

#include "l0fgl/data_model.hpp"

namespace l0fgl {

enum class WeightScheme { plain, adaptive };

std::string to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(const std::string& text);

/// Tuning parameters and approximation constants of the L0-fused group lasso
///
///   P(beta) = lambda1 sum_j w1_j ||beta_j||_2
///           + lambda0 sum_j sum_{(r,s)} w0_{j,rs} ||beta_{j,r} - beta_{j,s}||_0
///
/// with beta_{j,0} = 0. The intercept is never penalized.
struct PenaltyConfig {
    double lambda1 = 0.0;
    double lambda0 = 0.0;
    WeightScheme weight_scheme = WeightScheme::plain;
    double gamma = 10.0;                   // sharpness of the smooth L0 surrogate
    double c = 1e-5;                       // offset in the smoothed norms
    double adaptive_gamma_exponent = 1.0;  // w1 = sqrt(p_j) ||ml_j||^-exponent

    void validate() const;
};

inline constexpr double kAdaptiveWeightCap = 1e12;

struct PairWeight {
    LevelPair pair;
    double weight = 0.0;
    bool capped = false;  // ML difference was exactly zero
};

struct WeightSet {
    VectorXd w1;                               // one per factor
    std::vector<bool> w1_capped;
    std::vector<std::vector<PairWeight>> w0;   // per factor, keyed by difference_set order
};

WeightSet weights_plain(const Dataset& data);

/// Plain weights scaled by inverse ML magnitudes. Zero ML norms or differences
/// give a weight capped at 1e12 and flagged.
WeightSet weights_adaptive(const Dataset& data, const CoefVector& ml_estimate,
                           double exponent = 1.0);

WeightSet make_weights(const Dataset& data, const PenaltyConfig& cfg,
                       const CoefVector* ml_estimate);

double penalty_exact(const CoefVector& beta, const PenaltyConfig& cfg, const WeightSet& weights,
                     const ModelSchema& schema);

/// lambda1 sum w1 gl_smooth(beta_j) + lambda0 sum w0 l0_smooth(d): the smooth
/// surrogate PIRLS descends on.
double penalty_smooth(const CoefVector& beta, const PenaltyConfig& cfg, const WeightSet& weights,
                      const ModelSchema& schema);

/// Smooth L0 "norm" N(xi) = 2 / (1 + exp(-gamma |xi|)) - 1, in [0, 1).
double l0_smooth(double xi, double gamma);

/// D(xi) = 2 gamma s (1 - s) xi / sqrt(xi^2 + c) with s = 1 / (1 + exp(-gamma |xi|)).
double l0_smooth_deriv(double xi, double gamma, double c);

/// D(d) / d in the closed form that stays finite at d = 0.
double l0_curvature(double d, double gamma, double c);

/// (xi^T xi + c)^(1/2)
double gl_smooth(const VectorXd& block, double c);

/// Curvature matrix of the quadratic L0 approximation for factor j at the
/// current block, lambda0 sum_l w0_l D(a_l^T b)/(a_l^T b) a_l a_l^T.
MatrixXd build_A_lambda_j(const VectorXd& block, int j, const PenaltyConfig& cfg,
                          const WeightSet& weights, const ModelSchema& schema);

/// (p+1) x (p+1) block-diagonal curvature with a zero intercept row and
/// column. Each block holds A_lambda_j plus the group lasso term
/// lambda1 w1_j / gl_smooth(beta_j, c) I.
MatrixXd build_A_lambda_full(const CoefVector& beta, const PenaltyConfig& cfg,
                             const WeightSet& weights, const ModelSchema& schema);

}  // namespace l0fgl
