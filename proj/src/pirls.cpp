#include "l0fgl/pirls.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "l0fgl/kernels.hpp"
#include "l0fgl/likelihood.hpp"

namespace l0fgl {

std::string to_string(StartValue start) { return start == StartValue::ml ? "ml" : "zero"; }

StartValue parse_start_value(const std::string& text) {
    if (text == "ml") return StartValue::ml;
    if (text == "zero") return StartValue::zero;
    throw std::invalid_argument("unknown start value '" + text + "' (expected zero or ml)");
}

std::optional<VectorXd> ml_start(const Dataset& data, std::string* reason) {
    auto ml = fit_ml(data);
    if (ml.failed) {
        if (reason != nullptr) *reason = ml.failure_reason;
        return std::nullopt;
    }
    const auto state = LikelihoodState::at(data, ml.beta.flat());
    if (state.w.minCoeff() < kMinWorkingWeight) {
        if (reason != nullptr) *reason = "ML fitted probabilities are numerically 0 or 1";
        return std::nullopt;
    }
    return ml.beta.flat();
}

void PirlsSettings::validate() const {
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("PIRLS step size must lie in (0, 1]");
    if (!(tol > 0.0)) throw std::invalid_argument("PIRLS tolerance must be positive");
    if (max_steps < 1) throw std::invalid_argument("PIRLS needs at least one step");
}

double pirls_surrogate_objective(const CoefVector& beta, const Dataset& data,
                                 const PenaltyConfig& cfg, const WeightSet& weights) {
    return -log_likelihood(beta, data) + penalty_smooth(beta, cfg, weights, data.schema);
}

FitResult pirls_fit(const Dataset& data, const PenaltyConfig& cfg, const WeightSet& weights,
                    const PirlsSettings& settings, const VectorXd* initial) {
    cfg.validate();
    settings.validate();
    const auto& schema = data.schema;
    const double ysum = data.y.sum();
    if (ysum <= 0.0 || ysum >= data.n())
        return FitResult::failure(CoefVector(schema), 0, "response is constant");

    CoefVector beta(schema);
    std::string note;
    if (initial != nullptr) {
        beta = CoefVector(schema, *initial);
    } else if (settings.start == StartValue::ml) {
        std::string reason;
        if (const auto ml = ml_start(data, &reason)) {
            beta = CoefVector(schema, *ml);
        } else {
            note = "ML start unavailable (" + reason + "), started from zero";
        }
    }

    double objective = settings.monitor_objective
                           ? pirls_surrogate_objective(beta, data, cfg, weights)
                           : 0.0;
    bool converged = false;
    int step = 0;
    for (step = 1; step <= settings.max_steps; ++step) {
        WorkingResponse wr;
        try {
            wr = working_response(beta, data);
        } catch (const DegenerateWeightsError& e) {
            return FitResult::failure(beta, step, e.what());
        }

        MatrixXd system = kernels::weighted_gram(data, wr.w);
        system += build_A_lambda_full(beta, cfg, weights, schema);
        const VectorXd rhs = kernels::transpose_times(data, wr.w.cwiseProduct(wr.y_tilde));

        Eigen::LLT<MatrixXd> llt(system);
        if (llt.info() != Eigen::Success) {
            system.diagonal().array() += 1e-10;
            llt.compute(system);
            if (llt.info() != Eigen::Success)
                return FitResult::failure(beta, step, "penalized normal equations are singular");
        }
        const VectorXd target = llt.solve(rhs);
        CoefVector next(schema, (1.0 - settings.nu) * beta.flat() + settings.nu * target);
        if (!next.flat().allFinite())
            return FitResult::failure(beta, step, "non-finite PIRLS iterate");

        if (settings.monitor_objective) {
            const double next_objective = pirls_surrogate_objective(next, data, cfg, weights);
            if (next_objective > objective + 1e-8 * (1.0 + std::abs(objective))) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "surrogate objective increased at step " << step << " from " << objective
                    << " to " << next_objective;
                return FitResult::failure(beta, step, msg.str());
            }
            objective = next_objective;
        }

        const double change = (next.flat() - beta.flat()).lpNorm<Eigen::Infinity>();
        beta = std::move(next);
        if (change <= settings.tol) {
            converged = true;
            break;
        }
    }

    FitResult result;
    result.beta = threshold_solution(beta, schema, settings.eps_fuse, settings.eps_zero);
    result.converged = converged;
    result.iterations = converged ? step : settings.max_steps;
    result.objective = -log_likelihood(result.beta, data) +
                       penalty_exact(result.beta, cfg, weights, schema);
    result.note = note;
    if (!converged) {
        if (!result.note.empty()) result.note += "; ";
        result.note += "step limit reached";
    }
    return result;
}

}  // namespace l0fgl
