#include "l0fgl/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "l0fgl/kernels.hpp"

namespace l0fgl {

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logistic(double eta) {
    const double e = std::clamp(eta, -kEtaClamp, kEtaClamp);
    return 1.0 / (1.0 + std::exp(-e));
}

LikelihoodState LikelihoodState::at(const Dataset& data, const VectorXd& beta) {
    LikelihoodState s;
    s.eta = kernels::linear_predictor(data, beta);
    s.pi = s.eta.unaryExpr([](double e) { return logistic(e); });
    s.w = s.pi.array() * (1.0 - s.pi.array());
    return s;
}

double log_likelihood(const VectorXd& beta, const Dataset& data) {
    const VectorXd eta = kernels::linear_predictor(data, beta);
    double ll = 0.0;
    for (int i = 0; i < data.n(); ++i) ll += data.y[i] * eta[i] - softplus(eta[i]);
    return ll;
}

double log_likelihood(const CoefVector& beta, const Dataset& data) {
    return log_likelihood(beta.flat(), data);
}

VectorXd gradient(const VectorXd& beta, const Dataset& data) {
    const auto s = LikelihoodState::at(data, beta);
    return kernels::transpose_times(data, data.y - s.pi);
}

VectorXd gradient(const CoefVector& beta, const Dataset& data) { return gradient(beta.flat(), data); }

MatrixXd hessian(const VectorXd& beta, const Dataset& data) {
    const auto s = LikelihoodState::at(data, beta);
    return -kernels::weighted_gram(data, s.w);
}

MatrixXd hessian(const CoefVector& beta, const Dataset& data) { return hessian(beta.flat(), data); }

WorkingResponse working_response(const VectorXd& beta, const Dataset& data) {
    auto s = LikelihoodState::at(data, beta);
    const double wmin = s.w.minCoeff();
    if (!(wmin >= kMinWorkingWeight)) {
        throw DegenerateWeightsError("IRLS weight " + std::to_string(wmin) +
                                     " below 1e-10; fitted probabilities are numerically 0 or 1");
    }
    WorkingResponse wr;
    wr.y_tilde = s.eta.array() + (data.y - s.pi).array() / s.w.array();
    wr.w = std::move(s.w);
    wr.eta = std::move(s.eta);
    return wr;
}

WorkingResponse working_response(const CoefVector& beta, const Dataset& data) {
    return working_response(beta.flat(), data);
}

FitResult fit_ml(const Dataset& data, const MlSettings& settings) {
    const int m = data.schema.num_columns();
    CoefVector beta(data.schema);
    const double ysum = data.y.sum();
    if (ysum <= 0.0 || ysum >= data.n()) {
        return FitResult::failure(beta, 0, "response is constant; the ML estimate does not exist");
    }

    VectorXd b = VectorXd::Zero(m);
    double ll = log_likelihood(b, data);
    for (int it = 1; it <= settings.max_iter; ++it) {
        const auto s = LikelihoodState::at(data, b);
        const VectorXd score = kernels::transpose_times(data, data.y - s.pi);
        if (score.lpNorm<Eigen::Infinity>() < settings.tol) {
            beta.flat() = b;
            FitResult r;
            r.beta = beta;
            r.converged = true;
            r.iterations = it - 1;
            r.objective = -ll;
            return r;
        }

        MatrixXd info = kernels::weighted_gram(data, s.w);
        Eigen::LLT<MatrixXd> llt(info);
        if (llt.info() != Eigen::Success) {
            info.diagonal().array() += 1e-10;
            llt.compute(info);
            if (llt.info() != Eigen::Success) {
                beta.flat() = b;
                return FitResult::failure(beta, it, "information matrix is singular");
            }
        }
        const VectorXd step = llt.solve(score);

        double t = 1.0;
        VectorXd candidate = b + step;
        double ll_new = log_likelihood(candidate, data);
        for (int halving = 0; halving < 30 && !(ll_new >= ll - 1e-12 * std::abs(ll)); ++halving) {
            t *= 0.5;
            candidate = b + t * step;
            ll_new = log_likelihood(candidate, data);
        }
        if (!candidate.allFinite()) {
            beta.flat() = b;
            return FitResult::failure(beta, it, "non-finite Newton iterate");
        }
        b = std::move(candidate);
        ll = ll_new;
        if (b.lpNorm<Eigen::Infinity>() > settings.divergence_bound) {
            beta.flat() = b;
            return FitResult::failure(beta, it, "coefficients diverge (||beta||_inf > 1e3)");
        }
    }
    beta.flat() = b;
    auto r = FitResult::failure(beta, settings.max_iter, "Newton iterations exhausted");
    r.objective = -ll;
    return r;
}

}  // namespace l0fgl
