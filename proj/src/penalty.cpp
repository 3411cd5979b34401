#include "l0fgl/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace l0fgl {

std::string to_string(WeightScheme scheme) {
    return scheme == WeightScheme::adaptive ? "adaptive" : "plain";
}

WeightScheme parse_weight_scheme(const std::string& text) {
    if (text == "plain") return WeightScheme::plain;
    if (text == "adaptive") return WeightScheme::adaptive;
    throw std::invalid_argument("unknown weight scheme '" + text + "' (expected plain or adaptive)");
}

void PenaltyConfig::validate() const {
    if (!(lambda1 >= 0.0) || !(lambda0 >= 0.0))
        throw std::invalid_argument("tuning parameters must be non-negative");
    if (!(gamma > 0.0) || !(c > 0.0))
        throw std::invalid_argument("gamma and c must be strictly positive");
    if (!(adaptive_gamma_exponent > 0.0))
        throw std::invalid_argument("adaptive exponent must be strictly positive");
}

WeightSet weights_plain(const Dataset& data) {
    const auto& schema = data.schema;
    const int J = schema.num_factors();
    const double n = data.n();
    WeightSet ws;
    ws.w1.resize(J);
    ws.w1_capped.assign(J, false);
    ws.w0.resize(J);
    for (int j = 0; j < J; ++j) {
        const int pj = schema.block_size(j);
        ws.w1[j] = std::sqrt(static_cast<double>(pj));
        const auto counts = data.level_counts(j);
        const bool ordinal = schema.factor(j).scale == Scale::ordinal;
        for (const auto& pair : difference_set(schema, j)) {
            const double share = std::sqrt((counts[pair.r] + counts[pair.s]) / n);
            const double w = ordinal ? share : 2.0 / (pj + 1) * share;
            ws.w0[j].push_back({pair, w, false});
        }
    }
    return ws;
}

WeightSet weights_adaptive(const Dataset& data, const CoefVector& ml_estimate, double exponent) {
    if (!ml_estimate.flat().allFinite())
        throw std::invalid_argument("adaptive weights need a finite ML estimate");
    WeightSet ws = weights_plain(data);
    const int J = data.schema.num_factors();
    auto scaled = [](double base, double magnitude, bool& capped) {
        if (magnitude == 0.0 || base / magnitude > kAdaptiveWeightCap) {
            capped = true;
            return kAdaptiveWeightCap;
        }
        return base / magnitude;
    };
    for (int j = 0; j < J; ++j) {
        const double norm = ml_estimate.block(j).norm();
        bool capped = false;
        ws.w1[j] = scaled(ws.w1[j], std::pow(norm, exponent), capped);
        ws.w1_capped[j] = capped;
        for (auto& pw : ws.w0[j]) {
            const double diff = std::abs(ml_estimate.level(j, pw.pair.r) - ml_estimate.level(j, pw.pair.s));
            pw.weight = scaled(pw.weight, diff, pw.capped);
        }
    }
    return ws;
}

WeightSet make_weights(const Dataset& data, const PenaltyConfig& cfg, const CoefVector* ml_estimate) {
    if (cfg.weight_scheme == WeightScheme::plain) return weights_plain(data);
    if (ml_estimate == nullptr)
        throw std::invalid_argument("adaptive weights need an ML estimate");
    return weights_adaptive(data, *ml_estimate, cfg.adaptive_gamma_exponent);
}

double l0_smooth(double xi, double gamma) {
    return 2.0 / (1.0 + std::exp(-gamma * std::abs(xi))) - 1.0;
}

namespace {

// s (1 - s) for s = 1 / (1 + exp(-gamma |xi|)), without cancellation.
double logistic_slope(double xi, double gamma) {
    const double t = std::exp(-gamma * std::abs(xi));
    return t / ((1.0 + t) * (1.0 + t));
}

}  // namespace

double l0_smooth_deriv(double xi, double gamma, double c) {
    return 2.0 * gamma * logistic_slope(xi, gamma) * xi / std::sqrt(xi * xi + c);
}

double l0_curvature(double d, double gamma, double c) {
    return 2.0 * gamma * logistic_slope(d, gamma) / std::sqrt(d * d + c);
}

double gl_smooth(const VectorXd& block, double c) { return std::sqrt(block.squaredNorm() + c); }

double penalty_exact(const CoefVector& beta, const PenaltyConfig& cfg, const WeightSet& weights,
                     const ModelSchema& schema) {
    double gl = 0.0;
    double l0 = 0.0;
    for (int j = 0; j < schema.num_factors(); ++j) {
        gl += weights.w1[j] * beta.block(j).norm();
        for (const auto& pw : weights.w0[j]) {
            if (beta.level(j, pw.pair.r) != beta.level(j, pw.pair.s)) l0 += pw.weight;
        }
    }
    return cfg.lambda1 * gl + cfg.lambda0 * l0;
}

double penalty_smooth(const CoefVector& beta, const PenaltyConfig& cfg, const WeightSet& weights,
                      const ModelSchema& schema) {
    double gl = 0.0;
    double l0 = 0.0;
    for (int j = 0; j < schema.num_factors(); ++j) {
        gl += weights.w1[j] * gl_smooth(beta.block(j), cfg.c);
        for (const auto& pw : weights.w0[j]) {
            l0 += pw.weight * l0_smooth(beta.level(j, pw.pair.r) - beta.level(j, pw.pair.s), cfg.gamma);
        }
    }
    return cfg.lambda1 * gl + cfg.lambda0 * l0;
}

MatrixXd build_A_lambda_j(const VectorXd& block, int j, const PenaltyConfig& cfg,
                          const WeightSet& weights, const ModelSchema& schema) {
    const int pj = schema.block_size(j);
    MatrixXd A = MatrixXd::Zero(pj, pj);
    if (cfg.lambda0 == 0.0) return A;
    auto coef = [&](int r) { return r == 0 ? 0.0 : block[r - 1]; };
    for (const auto& pw : weights.w0[j]) {
        const int r = pw.pair.r;
        const int s = pw.pair.s;
        const double k = cfg.lambda0 * pw.weight * l0_curvature(coef(r) - coef(s), cfg.gamma, cfg.c);
        // a_l = e_r - e_s restricted to the non-reference levels.
        A(s - 1, s - 1) += k;
        if (r > 0) {
            A(r - 1, r - 1) += k;
            A(r - 1, s - 1) -= k;
            A(s - 1, r - 1) -= k;
        }
    }
    return A;
}

MatrixXd build_A_lambda_full(const CoefVector& beta, const PenaltyConfig& cfg,
                             const WeightSet& weights, const ModelSchema& schema) {
    const int m = schema.num_columns();
    MatrixXd A = MatrixXd::Zero(m, m);
    for (int j = 0; j < schema.num_factors(); ++j) {
        const int start = schema.start(j);
        const int pj = schema.block_size(j);
        const VectorXd block = beta.block(j);
        A.block(start, start, pj, pj) = build_A_lambda_j(block, j, cfg, weights, schema);
        if (cfg.lambda1 != 0.0) {
            A.block(start, start, pj, pj).diagonal().array() +=
                cfg.lambda1 * weights.w1[j] / gl_smooth(block, cfg.c);
        }
    }
    return A;
}

}  // namespace l0fgl
