#pragma once

#include <stdexcept>

#include "l0fgl/data_model.hpp"
#include "l0fgl/fit_result.hpp"

namespace l0fgl {

/// IRLS weight fell below the degeneracy floor, which signals separation.
class DegenerateWeightsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kEtaClamp = 30.0;
inline constexpr double kMinWorkingWeight = 1e-10;

/// Linear predictor, fitted probabilities and IRLS weights at one beta.
/// The probabilities use eta clamped to [-30, 30] so the weights stay
/// representable; eta itself is stored unclamped.
struct LikelihoodState {
    VectorXd eta;
    VectorXd pi;
    VectorXd w;

    static LikelihoodState at(const Dataset& data, const VectorXd& beta);
};

/// Stable log(1 + exp(x)).
double softplus(double x);
double logistic(double eta);

/// L_n(beta) = sum_i y_i eta_i - log(1 + exp(eta_i)).
double log_likelihood(const VectorXd& beta, const Dataset& data);
double log_likelihood(const CoefVector& beta, const Dataset& data);

/// Gradient X^T (y - pi).
VectorXd gradient(const VectorXd& beta, const Dataset& data);
VectorXd gradient(const CoefVector& beta, const Dataset& data);

/// Hessian -X^T W X.
MatrixXd hessian(const VectorXd& beta, const Dataset& data);
MatrixXd hessian(const CoefVector& beta, const Dataset& data);

struct WorkingResponse {
    VectorXd y_tilde;  // X beta + W^{-1} (y - pi)
    VectorXd w;        // pi (1 - pi)
    VectorXd eta;
};

/// Throws DegenerateWeightsError when any weight is below 1e-10.
WorkingResponse working_response(const VectorXd& beta, const Dataset& data);
WorkingResponse working_response(const CoefVector& beta, const Dataset& data);

struct MlSettings {
    double tol = 1e-8;              // max-norm of the score
    int max_iter = 100;
    double divergence_bound = 1e3;  // ||beta||_inf above this counts as a failure
};

/// Unpenalized maximum likelihood by Newton-Raphson with step halving.
/// Separation, divergence and non-convergence come back as failed results.
FitResult fit_ml(const Dataset& data, const MlSettings& settings = {});

}  // namespace l0fgl
