#pragma once

#include <optional>

#include "l0fgl/data_model.hpp"
#include "l0fgl/fit_result.hpp"
#include "l0fgl/penalty.hpp"
#include "l0fgl/threshold.hpp"

namespace l0fgl {

enum class StartValue { zero, ml };

std::string to_string(StartValue start);
StartValue parse_start_value(const std::string& text);

struct PirlsSettings {
    double nu = 0.05;        // damping, beta <- (1 - nu) beta + nu beta_new
    double tol = 1e-5;       // stop when ||beta_{k+1} - beta_k||_inf <= tol
    int max_steps = 250;
    StartValue start = StartValue::ml;  // falls back to zero, see ml_start
    double eps_fuse = kDefaultFuseEps;
    double eps_zero = kDefaultZeroEps;
    bool monitor_objective = true;

    void validate() const;
};

/// Penalized IRLS on the smooth surrogate
///
///   -L_n(beta) + lambda1 sum w1 gl_smooth(beta_j) + lambda0 sum w0 N(d).
///
/// Each step solves (X^T W X + A_lambda) beta_new = X^T W y_tilde at the
/// current iterate and moves a fraction nu towards beta_new. The returned
/// coefficients are passed through threshold_solution.
///
/// `initial` overrides `settings.start` when given.
FitResult pirls_fit(const Dataset& data, const PenaltyConfig& cfg, const WeightSet& weights,
                    const PirlsSettings& settings = {}, const VectorXd* initial = nullptr);

/// The ML estimate as a starting value. Returns nothing, with the reason in
/// `reason`, when the ML fit fails or when its IRLS weights are already
/// degenerate (separated data), since no IRLS step could start from it.
std::optional<VectorXd> ml_start(const Dataset& data, std::string* reason = nullptr);

/// Value of the surrogate objective above.
double pirls_surrogate_objective(const CoefVector& beta, const Dataset& data,
                                 const PenaltyConfig& cfg, const WeightSet& weights);

}  // namespace l0fgl
