#include "l0fgl/bcd.hpp"

#include <cmath>
#include <stdexcept>

#include "l0fgl/kernels.hpp"
#include "l0fgl/likelihood.hpp"

namespace l0fgl {

void BcdSettings::validate() const {
    if (!(tol > 0.0) || !(inner.tol > 0.0) || !(inner.c_inner > 0.0))
        throw std::invalid_argument("BCD tolerances must be positive");
    if (max_steps < 1 || inner.max_iter < 1)
        throw std::invalid_argument("BCD iteration limits must be positive");
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("BCD damping must lie in (0, 1]");
}

namespace {

double smooth_l0_block(const VectorXd& block, int j, const PenaltyConfig& cfg,
                       const WeightSet& weights) {
    if (cfg.lambda0 == 0.0) return 0.0;
    auto coef = [&](int r) { return r == 0 ? 0.0 : block[r - 1]; };
    double sum = 0.0;
    for (const auto& pw : weights.w0[j])
        sum += pw.weight * l0_smooth(coef(pw.pair.r) - coef(pw.pair.s), cfg.gamma);
    return cfg.lambda0 * sum;
}

}  // namespace

double approx_g(const VectorXd& block, const CoefVector& beta_k, int j, const Dataset& data,
                const PenaltyConfig& cfg, const WeightSet& weights) {
    const auto wr = working_response(beta_k, data);
    CoefVector beta = beta_k;
    beta.block(j) = block;
    const VectorXd resid = wr.y_tilde - data.X * beta.flat();
    const VectorXd frozen = beta_k.block(j);
    const MatrixXd A = build_A_lambda_j(frozen, j, cfg, weights, data.schema);
    return resid.dot(wr.w.cwiseProduct(resid)) / (2.0 * data.n()) +
           smooth_l0_block(frozen, j, cfg, weights) +
           0.5 * (block.dot(A * block) + frozen.dot(A * frozen));
}

BlockSurrogate block_surrogate(const Dataset& data, int j, const VectorXd& current_block,
                               const VectorXd& frozen_block, const VectorXd& residual,
                               const VectorXd& w, const PenaltyConfig& cfg,
                               const WeightSet& weights) {
    const int n = data.n();
    const int pj = data.schema.block_size(j);
    const int start = data.schema.start(j);
    VectorXd level_w = VectorXd::Zero(pj);
    VectorXd level_wr = VectorXd::Zero(pj);
    double wrr = 0.0;
    for (int i = 0; i < n; ++i) {
        const int col = data.active(i, j);
        double r = residual[i];
        if (col >= 0) {
            r += current_block[col - start];
            level_w[col - start] += w[i];
            level_wr[col - start] += w[i] * r;
        }
        wrr += w[i] * r * r;
    }
    BlockSurrogate s;
    const MatrixXd A = build_A_lambda_j(frozen_block, j, cfg, weights, data.schema);
    s.Q = A;
    s.Q.diagonal() += level_w / n;
    s.lin = level_wr / n;
    s.constant = wrr / (2.0 * n) + smooth_l0_block(frozen_block, j, cfg, weights) +
                 0.5 * frozen_block.dot(A * frozen_block);
    return s;
}

InnerResult inner_quasi_newton(const SmoothObjective& objective, const VectorXd& start,
                               const InnerSettings& settings, bool snap_to_zero) {
    BfgsSettings bs;
    bs.grad_tol = settings.tol;
    bs.max_iter = settings.max_iter;
    const auto r = bfgs_minimize(objective, start, bs);
    InnerResult out;
    out.block = r.x;
    out.converged = r.converged;
    out.line_search_failed = r.line_search_failed;
    if (snap_to_zero && out.block.norm() < 10.0 * std::sqrt(settings.c_inner)) {
        out.block.setZero();
        out.snapped = true;
    }
    return out;
}

FitResult bcd_fit(const Dataset& data, const PenaltyConfig& cfg, const WeightSet& weights,
                  const BcdSettings& settings, const VectorXd* initial) {
    cfg.validate();
    settings.validate();
    const auto& schema = data.schema;
    const int n = data.n();
    const int J = schema.num_factors();
    // A constant response (or separated data) has no finite optimum; the
    // iteration then runs until the working weights degenerate and returns the
    // finite iterate reached, flagged as not converged.
    const double ysum = data.y.sum();
    const bool constant_response = ysum <= 0.0 || ysum >= n;

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

    int inner_trouble = 0;
    bool converged = false;
    bool degenerate = false;
    int step = 0;
    for (step = 1; step <= settings.max_steps; ++step) {
        WorkingResponse wr;
        try {
            wr = working_response(beta, data);
        } catch (const DegenerateWeightsError&) {
            degenerate = true;
            break;
        }
        const CoefVector frozen = beta;
        // y~ - X beta, kept current as blocks change.
        VectorXd residual = wr.y_tilde - wr.eta;

        {
            const double wsum = wr.w.sum();
            const double delta = wr.w.dot(residual) / wsum;
            beta.intercept() += settings.nu * delta;
            residual.array() -= settings.nu * delta;
        }

        for (int j = 0; j < J; ++j) {
            const VectorXd current = beta.block(j);
            const VectorXd frozen_block = frozen.block(j);
            const auto surrogate =
                block_surrogate(data, j, current, frozen_block, residual, wr.w, cfg, weights);
            const double group = cfg.lambda1 * weights.w1[j];
            const double c_inner = settings.inner.c_inner;

            const SmoothObjective smoothed = [&](const VectorXd& b, VectorXd* grad) {
                const double norm = std::sqrt(b.squaredNorm() + c_inner);
                if (grad != nullptr) *grad = surrogate.grad(b) + (group / norm) * b;
                return surrogate.value(b) + group * norm;
            };
            auto exact = [&](const VectorXd& b) { return surrogate.value(b) + group * b.norm(); };

            const auto inner = inner_quasi_newton(smoothed, current, settings.inner, group > 0.0);
            if (!inner.converged) ++inner_trouble;

            // Never accept a block that raises the nonsmooth surrogate.
            VectorXd chosen = inner.block;
            const double start_value = exact(current);
            if (exact(chosen) > start_value + 1e-12 * (1.0 + std::abs(start_value))) chosen = current;

            const VectorXd updated = (1.0 - settings.nu) * current + settings.nu * chosen;
            if (!updated.allFinite()) return FitResult::failure(beta, step, "non-finite BCD iterate");
            const VectorXd delta = updated - current;
            if (delta.squaredNorm() > 0.0) {
                const int col0 = schema.start(j);
                for (int i = 0; i < n; ++i) {
                    const int col = data.active(i, j);
                    if (col >= 0) residual[i] -= delta[col - col0];
                }
            }
            beta.block(j) = updated;
        }

        if (!beta.flat().allFinite()) return FitResult::failure(beta, step, "non-finite BCD iterate");
        const double change = (beta.flat() - frozen.flat()).lpNorm<Eigen::Infinity>();
        if (change <= settings.tol) {
            converged = true;
            break;
        }
    }

    FitResult result;
    result.beta = threshold_solution(beta, schema, settings.eps_fuse, settings.eps_zero);
    result.converged = converged;
    result.iterations = converged ? step : degenerate ? step - 1 : settings.max_steps;
    result.objective = -log_likelihood(result.beta, data) / n +
                       penalty_exact(result.beta, cfg, weights, schema);
    result.note = note;
    auto append = [&](const std::string& text) {
        if (!result.note.empty()) result.note += "; ";
        result.note += text;
    };
    if (inner_trouble > 0) append(std::to_string(inner_trouble) + " inner solves stopped before tolerance");
    if (constant_response) append("response is constant");
    if (degenerate) {
        append("stopped at step " + std::to_string(step) + ": working weights degenerate (separation)");
    } else if (!converged) {
        append("step limit reached");
    }
    return result;
}

}  // namespace l0fgl
