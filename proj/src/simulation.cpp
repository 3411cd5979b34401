#include "l0fgl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "l0fgl/likelihood.hpp"
#include "l0fgl/rng.hpp"

namespace l0fgl {

void DesignSpec::validate() const {
    if (n < 1) throw std::invalid_argument("design sample size must be positive");
    if (r_replications < 0) throw std::invalid_argument("replication count must be non-negative");
    if (beta_star.size() != schema.num_columns())
        throw DimensionError("beta_star does not match the design schema");
    if (static_cast<int>(level_probs.size()) != schema.num_factors())
        throw DimensionError("one probability vector per factor is required");
    for (int j = 0; j < schema.num_factors(); ++j) {
        const auto& probs = level_probs[j];
        if (static_cast<int>(probs.size()) != schema.factor(j).num_levels)
            throw DimensionError("probability vector of factor " + schema.factor(j).name +
                                 " has the wrong length");
        double total = 0.0;
        for (double p : probs) {
            if (!(p > 0.0)) throw std::invalid_argument("level probabilities must be positive");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("level probabilities must sum to 1");
    }
}

namespace {

std::vector<FactorSpec> ordinal_factors(int count, int levels, int first_index) {
    std::vector<FactorSpec> out;
    for (int j = 0; j < count; ++j)
        out.push_back({"x" + std::to_string(first_index + j), levels, Scale::ordinal});
    return out;
}

std::vector<double> equal_probs(int levels) { return std::vector<double>(levels, 1.0 / levels); }

CoefVector coefs(const ModelSchema& schema, const std::vector<double>& leading) {
    VectorXd flat = VectorXd::Zero(schema.num_columns());
    for (std::size_t i = 0; i < leading.size(); ++i) flat[static_cast<int>(i)] = leading[i];
    return CoefVector(schema, flat);
}

RowMajorMatrixXi draw_levels(const DesignSpec& spec, CounterRng& rng) {
    const int J = spec.schema.num_factors();
    RowMajorMatrixXi levels(spec.n, J);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < J; ++j) levels(i, j) = rng.categorical(spec.level_probs[j]);
    return levels;
}

Dataset draw_dataset(const DesignSpec& spec, int replication, Stream level_stream,
                     Stream response_stream) {
    CounterRng level_rng(spec.seed, static_cast<std::uint64_t>(replication), level_stream);
    CounterRng response_rng(spec.seed, static_cast<std::uint64_t>(replication), response_stream);
    const auto levels = draw_levels(spec, level_rng);
    VectorXd y = VectorXd::Zero(spec.n);
    Dataset data = encode(levels, spec.schema, y);
    const VectorXd eta = data.X * spec.beta_star.flat();
    for (int i = 0; i < spec.n; ++i) data.y[i] = response_rng.bernoulli(logistic(eta[i])) ? 1.0 : 0.0;
    return data;
}

}  // namespace

DesignSpec design_b8(int n, std::uint64_t seed, int replications) {
    DesignSpec spec;
    spec.name = "b8";
    spec.schema = ModelSchema(ordinal_factors(8, 4, 1));
    spec.beta_star = coefs(spec.schema, {2, 0, -0.8, -0.8, 1, 1, 0, 0.4, 0.6, 0.8, -0.7, -1, 0});
    spec.n = n;
    spec.r_replications = replications;
    spec.seed = seed;
    CounterRng rng(seed, 0, Stream::level_probs);
    for (int j = 0; j < 8; ++j) {
        std::vector<double> probs(4);
        double total = 0.0;
        for (double& p : probs) total += (p = rng.uniform(0.12, 0.44));
        for (double& p : probs) p /= total;
        spec.level_probs.push_back(probs);
    }
    spec.validate();
    return spec;
}

DesignSpec design_highdim(std::uint64_t seed, int replications) {
    DesignSpec spec;
    spec.name = "highdim";
    auto factors = ordinal_factors(50, 4, 1);
    for (auto& f : ordinal_factors(10, 3, 51)) factors.push_back(f);
    spec.schema = ModelSchema(factors);
    spec.beta_star = coefs(spec.schema, {2, -1, 0.5, 2, 1.5, 1.5, 0.5, 1, 2, 2.5, -0.5, -0.3, 0.5, 2, 1, 3});
    spec.n = 100;
    spec.r_replications = replications;
    spec.seed = seed;
    for (const auto& f : factors) spec.level_probs.push_back(equal_probs(f.num_levels));
    spec.validate();
    return spec;
}

DesignSpec design_path(int n, std::uint64_t seed) {
    DesignSpec spec;
    spec.name = "path";
    spec.schema = ModelSchema({{"x1", 4, Scale::nominal}, {"x2", 3, Scale::nominal}});
    spec.beta_star = coefs(spec.schema, {2, 1.2, 1, 0.5, -0.8, -0.5});
    spec.n = n;
    spec.r_replications = 1;
    spec.seed = seed;
    for (const auto& f : spec.schema.factors()) spec.level_probs.push_back(equal_probs(f.num_levels));
    spec.validate();
    return spec;
}

SimulatedData simulate_dataset(const DesignSpec& spec, int replication) {
    return {draw_dataset(spec, replication, Stream::train_levels, Stream::train_response),
            draw_dataset(spec, replication, Stream::test_levels, Stream::test_response)};
}

std::string Method::name() const {
    std::string base;
    switch (kind) {
        case MethodKind::ml: return "ml";
        case MethodKind::l0_pirls: base = "l0_pirls"; break;
        case MethodKind::l0_fgl_pirls: base = "l0_fgl_pirls"; break;
        case MethodKind::l0_fgl_bcd: base = "l0_fgl_bcd"; break;
    }
    return weights == WeightScheme::adaptive ? base + "_adaptive" : base;
}

Method parse_method(const std::string& text) {
    for (auto kind : {MethodKind::ml, MethodKind::l0_pirls, MethodKind::l0_fgl_pirls, MethodKind::l0_fgl_bcd}) {
        for (auto scheme : {WeightScheme::plain, WeightScheme::adaptive}) {
            const Method m{kind, scheme};
            if (kind == MethodKind::ml && scheme == WeightScheme::adaptive) continue;
            if (m.name() == text) return m;
        }
    }
    throw std::invalid_argument("unknown method '" + text +
                                "' (expected ml or l0_pirls, l0_fgl_pirls, l0_fgl_bcd with optional _adaptive)");
}

std::vector<Method> parse_methods(const std::string& text) {
    std::vector<Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_method(item));
    return out;
}

MethodRecord run_method(const SimulatedData& data, const DesignSpec& spec, int replication,
                        const Method& method, const StudySettings& settings) {
    MethodRecord rec;
    rec.replication = replication;
    auto fail = [&](std::string reason) {
        rec.failed = true;
        rec.failure_reason = std::move(reason);
        return rec;
    };

    try {
        CoefVector estimate;
        if (method.kind == MethodKind::ml) {
            const auto ml = fit_ml(data.train);
            if (ml.failed) return fail("ML fit failed: " + ml.failure_reason);
            estimate = ml.beta;
        } else {
            WeightSet weights;
            if (method.weights == WeightScheme::adaptive) {
                const auto ml = fit_ml(data.train);
                if (ml.failed) return fail("ML fit for adaptive weights failed: " + ml.failure_reason);
                weights = weights_adaptive(data.train, ml.beta, settings.penalty.adaptive_gamma_exponent);
            } else {
                weights = weights_plain(data.train);
            }

            SolverOptions solver;
            solver.kind = method.kind == MethodKind::l0_fgl_bcd ? SolverKind::bcd : SolverKind::pirls;
            solver.pirls = settings.pirls;
            solver.bcd = settings.bcd;
            CvPlan plan;
            plan.k_folds = settings.k_folds;
            plan.n_lambda = settings.n_lambda;
            plan.seed = spec.seed;
            plan.stream = static_cast<std::uint64_t>(replication);
            PenaltyConfig base = settings.penalty;
            base.lambda1 = base.lambda0 = 0.0;
            base.weight_scheme = method.weights;

            const auto cv = method.kind == MethodKind::l0_pirls
                                ? cv_l0_only(data.train, solver, weights, base, plan)
                                : cv_two_step(data.train, solver, weights, base, plan);
            rec.lambda1 = cv.lambda1_opt;
            rec.lambda0 = cv.lambda0_opt;
            if (cv.final_fit.failed) return fail("final fit failed: " + cv.final_fit.failure_reason);
            estimate = cv.final_fit.beta;
        }
        rec.eval = evaluate(estimate, spec.beta_star, spec.schema, &data.test);
    } catch (const TuningError& e) {
        return fail(std::string("tuning failed: ") + e.what());
    }
    return rec;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

std::optional<Summary> summarize(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    Summary s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    s.q25 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q75 = quantile(values, 0.75);
    return s;
}

// Mean over replications where the value exists.
template <class Get>
std::optional<double> mean_of(const std::vector<MethodRecord>& records, Get get) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : records) {
        if (r.failed) continue;
        const std::optional<double> v = get(r);
        if (!v) continue;
        sum += *v;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

MethodSummary aggregate(const Method& method, std::vector<MethodRecord> records) {
    MethodSummary s;
    s.method = method;
    s.replications = static_cast<int>(records.size());
    std::vector<double> msecs, devs;
    for (const auto& r : records) {
        if (r.failed) {
            ++s.fails;
            continue;
        }
        msecs.push_back(r.eval.msec);
        if (r.eval.pred_deviance) devs.push_back(*r.eval.pred_deviance);
    }
    s.proportion_of_fails = s.replications > 0 ? static_cast<double>(s.fails) / s.replications : 0.0;
    s.msec = summarize(msecs);
    s.pred_deviance = summarize(devs);
    s.fp_sel = mean_of(records, [](const MethodRecord& r) { return r.eval.fp_sel; });
    s.fn_sel = mean_of(records, [](const MethodRecord& r) { return r.eval.fn_sel; });
    s.fp_fus = mean_of(records, [](const MethodRecord& r) { return r.eval.fp_fus; });
    s.fn_fus = mean_of(records, [](const MethodRecord& r) { return r.eval.fn_fus; });
    s.os = mean_of(records, [](const MethodRecord& r) { return std::optional<double>(r.eval.os); });
    s.ps = mean_of(records, [](const MethodRecord& r) { return std::optional<double>(r.eval.ps); });
    s.records = std::move(records);
    return s;
}

}  // namespace

ReplicationReport run_study(const DesignSpec& spec, const std::vector<Method>& methods,
                            const StudySettings& settings) {
    spec.validate();
    settings.pirls.validate();
    settings.bcd.validate();
    settings.penalty.validate();

    ReplicationReport report;
    report.design = spec.name;
    report.n = spec.n;
    report.replications = spec.r_replications;
    report.seed = spec.seed;
    if (methods.empty()) return report;

    const int R = spec.r_replications;
    const int M = static_cast<int>(methods.size());
    std::vector<SimulatedData> data(R);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < R; ++r) data[r] = simulate_dataset(spec, r);

    std::vector<MethodRecord> slots(static_cast<std::size_t>(R) * M);
    const int tasks = R * M;
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < tasks; ++t) {
        const int r = t / M;
        const int m = t % M;
        try {
            slots[t] = run_method(data[r], spec, r, methods[m], settings);
        } catch (const std::exception& e) {
            slots[t].replication = r;
            slots[t].failed = true;
            slots[t].failure_reason = std::string("unexpected error: ") + e.what();
        }
    }

    for (int m = 0; m < M; ++m) {
        std::vector<MethodRecord> records;
        for (int r = 0; r < R; ++r) records.push_back(slots[static_cast<std::size_t>(r) * M + m]);
        report.methods.push_back(aggregate(methods[m], std::move(records)));
    }
    return report;
}

}  // namespace l0fgl
