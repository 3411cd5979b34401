#include "l0fgl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "l0fgl/kernels.hpp"

namespace l0fgl {

namespace {

Rate ratio(int num, int den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / den;
}

}  // namespace

double msec(const CoefVector& beta_hat, const CoefVector& beta_star) {
    if (beta_hat.size() != beta_star.size()) throw DimensionError("msec: coefficient lengths differ");
    const int p = beta_hat.size() - 1;
    if (p == 0) return 0.0;
    return (beta_star.flat().tail(p) - beta_hat.flat().tail(p)).squaredNorm() / p;
}

std::pair<Rate, Rate> selection_rates(const CoefVector& beta_hat, const CoefVector& beta_star) {
    int null_total = 0, active_total = 0, fp = 0, fn = 0;
    for (int j = 0; j < beta_star.num_blocks(); ++j) {
        const bool truly_active = beta_star.block(j).cwiseAbs().maxCoeff() != 0.0;
        const bool selected = beta_hat.block(j).cwiseAbs().maxCoeff() != 0.0;
        if (truly_active) {
            ++active_total;
            if (!selected) ++fn;
        } else {
            ++null_total;
            if (selected) ++fp;
        }
    }
    return {ratio(fp, null_total), ratio(fn, active_total)};
}

std::pair<Rate, Rate> fusion_rates(const CoefVector& beta_hat, const CoefVector& beta_star,
                                   const ModelSchema& schema) {
    int equal_total = 0, unequal_total = 0, fp = 0, fn = 0;
    for (int j = 0; j < schema.num_factors(); ++j) {
        if (beta_star.block(j).cwiseAbs().sum() == 0.0) continue;
        for (const auto& [r, s] : difference_set(schema, j)) {
            const bool truth_equal = beta_star.level(j, r) == beta_star.level(j, s);
            const bool est_equal = beta_hat.level(j, r) == beta_hat.level(j, s);
            if (truth_equal) {
                ++equal_total;
                if (!est_equal) ++fp;
            } else {
                ++unequal_total;
                if (est_equal) ++fn;
            }
        }
    }
    return {ratio(fp, equal_total), ratio(fn, unequal_total)};
}

std::pair<int, int> sparsity(const CoefVector& beta_hat, const ModelSchema& schema) {
    int os = 0, ps = 0;
    for (int j = 0; j < schema.num_factors(); ++j) {
        const auto block = beta_hat.block(j);
        const int nonzero = static_cast<int>((block.array() != 0.0).count());
        os += nonzero;
        if (nonzero > 0) ++ps;
    }
    return {os, ps};
}

double predictive_deviance(const VectorXd& beta, const Dataset& heldout) {
    const VectorXd eta = kernels::linear_predictor(heldout, beta);
    constexpr double lo = 1e-12;
    double dev = 0.0;
    for (int i = 0; i < heldout.n(); ++i) {
        const double mu = std::clamp(1.0 / (1.0 + std::exp(-eta[i])), lo, 1.0 - lo);
        dev += heldout.y[i] * std::log(mu) + (1.0 - heldout.y[i]) * std::log(1.0 - mu);
    }
    return -2.0 * dev;
}

EvalReport evaluate(const CoefVector& beta_hat, const CoefVector& beta_star, const ModelSchema& schema,
                    const Dataset* test) {
    EvalReport r;
    r.msec = msec(beta_hat, beta_star);
    std::tie(r.fp_sel, r.fn_sel) = selection_rates(beta_hat, beta_star);
    std::tie(r.fp_fus, r.fn_fus) = fusion_rates(beta_hat, beta_star, schema);
    std::tie(r.os, r.ps) = sparsity(beta_hat, schema);
    if (test != nullptr) r.pred_deviance = predictive_deviance(beta_hat.flat(), *test);
    return r;
}

}  // namespace l0fgl
