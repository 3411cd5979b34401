#include "l0fgl/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "l0fgl/likelihood.hpp"
#include "l0fgl/metrics.hpp"
#include "l0fgl/rng.hpp"

namespace l0fgl {

std::string to_string(SolverKind kind) { return kind == SolverKind::bcd ? "bcd" : "pirls"; }

SolverKind parse_solver(const std::string& text) {
    if (text == "pirls") return SolverKind::pirls;
    if (text == "bcd") return SolverKind::bcd;
    throw std::invalid_argument("unknown solver '" + text + "' (expected pirls or bcd)");
}

void CvPlan::validate() const {
    if (k_folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
    if (n_lambda < 2) throw std::invalid_argument("lambda grid needs at least 2 values");
    if (!(lambda_lower >= 0.0)) throw std::invalid_argument("lambda_lower must be non-negative");
}

std::optional<VectorXd> solver_start(const Dataset& data, const SolverOptions& solver) {
    const StartValue start = solver.kind == SolverKind::pirls ? solver.pirls.start : solver.bcd.start;
    if (start != StartValue::ml) return std::nullopt;
    return ml_start(data);
}

FitResult fit_penalized(const Dataset& data, const PenaltyConfig& cfg, const WeightSet& weights,
                        const SolverOptions& solver, const VectorXd* initial) {
    // An explicit zero start must not be overridden by the solver's ML default.
    const VectorXd zero = VectorXd::Zero(data.schema.num_columns());
    const VectorXd* start = initial != nullptr ? initial : &zero;
    if (solver.kind == SolverKind::pirls) return pirls_fit(data, cfg, weights, solver.pirls, start);
    return bcd_fit(data, cfg, weights, solver.bcd, start);
}

bool is_null_model(const CoefVector& beta) {
    for (int j = 0; j < beta.num_blocks(); ++j)
        if (beta.block(j).cwiseAbs().maxCoeff() != 0.0) return false;
    return true;
}

namespace {

PenaltyConfig with_lambdas(const PenaltyConfig& base, double lambda1, double lambda0) {
    PenaltyConfig cfg = base;
    cfg.lambda1 = lambda1;
    cfg.lambda0 = lambda0;
    return cfg;
}

const VectorXd* ptr(const std::optional<VectorXd>& v) { return v ? &*v : nullptr; }

// Settings errors must surface before any parallel region is entered.
void validate_all(const SolverOptions& solver, const PenaltyConfig& base) {
    base.validate();
    solver.pirls.validate();
    solver.bcd.validate();
}

struct FoldData {
    Dataset train;
    Dataset test;
    std::optional<VectorXd> start;
};

std::vector<FoldData> make_folds(const Dataset& data, const std::vector<int>& assignment, int k,
                                 const SolverOptions& solver) {
    std::vector<FoldData> folds(k);
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < k; ++f) {
        std::vector<int> train_rows, test_rows;
        for (int i = 0; i < data.n(); ++i) (assignment[i] == f ? test_rows : train_rows).push_back(i);
        folds[f].train = data.subset(train_rows);
        folds[f].test = data.subset(test_rows);
        folds[f].start = solver_start(folds[f].train, solver);
    }
    return folds;
}

// Fits every (grid value, fold) pair, with lambda_of(value) giving the pair of
// tuning parameters. Returns the grid with mean held-out deviances.
template <class LambdaOf>
std::vector<GridPoint> evaluate_grid(const std::vector<FoldData>& folds,
                                     const std::vector<double>& values, const SolverOptions& solver,
                                     const WeightSet& weights, const PenaltyConfig& base,
                                     LambdaOf lambda_of, std::vector<std::vector<int>>* selected) {
    const int k = static_cast<int>(folds.size());
    const int m = static_cast<int>(values.size());
    std::vector<GridPoint> grid(m);
    for (int g = 0; g < m; ++g) {
        grid[g].lambda = values[g];
        grid[g].fold_deviance.assign(k, std::numeric_limits<double>::infinity());
    }
    if (selected != nullptr) selected->assign(k, std::vector<int>(m, -1));

    const int tasks = k * m;
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < tasks; ++t) {
        const int f = t / m;
        const int g = t % m;
        const auto [l1, l0] = lambda_of(values[g]);
        const auto fit = fit_penalized(folds[f].train, with_lambdas(base, l1, l0), weights, solver,
                                       ptr(folds[f].start));
        if (!fit.failed) {
            grid[g].fold_deviance[f] = predictive_deviance_heldout(fit, folds[f].test);
            if (selected != nullptr) (*selected)[f][g] = sparsity(fit.beta, folds[f].train.schema).second;
        }
    }

    for (auto& gp : grid) {
        gp.failed_folds = 0;
        double sum = 0.0;
        for (double d : gp.fold_deviance) {
            if (std::isfinite(d)) {
                sum += d;
            } else {
                ++gp.failed_folds;
            }
        }
        gp.mean_deviance = gp.failed_folds > 0 ? std::numeric_limits<double>::infinity() : sum / k;
    }
    for (int f = 0; f < k; ++f) {
        bool any = false;
        for (const auto& gp : grid) any |= std::isfinite(gp.fold_deviance[f]);
        if (!any) throw TuningError("every grid fit failed in fold " + std::to_string(f));
    }
    return grid;
}

// Minimal mean deviance; exact ties go to the larger lambda.
double select_optimum(const std::vector<GridPoint>& grid) {
    double best = std::numeric_limits<double>::infinity();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    for (const auto& gp : grid) {
        if (gp.mean_deviance <= best && std::isfinite(gp.mean_deviance)) {
            best = gp.mean_deviance;
            lambda = gp.lambda;
        }
    }
    if (std::isnan(lambda)) throw TuningError("no grid value was fitted in every fold");
    return lambda;
}

}  // namespace

double find_lambda_max(const Dataset& data, const SolverOptions& solver, const WeightSet& weights,
                       const PenaltyConfig& base, LambdaTarget which, double other_lambda,
                       int* probe_fits) {
    const auto start = solver_start(data, solver);
    double lambda = 1.0;
    int fits = 0;
    for (int doubling = 0; doubling <= 30; ++doubling, lambda *= 2.0) {
        const auto cfg = which == LambdaTarget::gl ? with_lambdas(base, lambda, other_lambda)
                                                   : with_lambdas(base, other_lambda, lambda);
        const auto fit = fit_penalized(data, cfg, weights, solver, ptr(start));
        ++fits;
        if (!fit.failed && is_null_model(fit.beta)) {
            if (probe_fits != nullptr) *probe_fits = fits;
            return lambda;
        }
    }
    if (probe_fits != nullptr) *probe_fits = fits;
    throw TuningError("no lambda up to 2^30 yields the null model");
}

std::vector<int> stratified_folds(const VectorXd& y, int k, std::uint64_t seed, std::uint64_t stream) {
    std::vector<int> pos, neg;
    for (int i = 0; i < y.size(); ++i) (y[i] != 0.0 ? pos : neg).push_back(i);
    if (y.size() < k) throw TuningError("fewer observations than folds");

    CounterRng rng(seed, stream, Stream::folds);
    auto shuffle = [&](std::vector<int>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    };
    shuffle(pos);
    shuffle(neg);
    std::vector<int> assignment(y.size());
    std::size_t slot = 0;
    for (int i : pos) assignment[i] = static_cast<int>(slot++ % k);
    for (int i : neg) assignment[i] = static_cast<int>(slot++ % k);
    return assignment;
}

double predictive_deviance_heldout(const FitResult& fit, const Dataset& heldout) {
    return predictive_deviance(fit.beta.flat(), heldout);
}

std::vector<double> linear_grid(double lo, double hi, int count) {
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i)
        grid[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    return grid;
}

CvResult cv_two_step(const Dataset& data, const SolverOptions& solver, const WeightSet& weights,
                     const PenaltyConfig& base, const CvPlan& plan) {
    plan.validate();
    validate_all(solver, base);
    CvResult result;

    int probes_gl = 0, probes_l0 = 0;
    const double max_gl =
        find_lambda_max(data, solver, weights, base, LambdaTarget::gl, 0.0, &probes_gl);
    const double max_l0 =
        find_lambda_max(data, solver, weights, base, LambdaTarget::l0, max_gl, &probes_l0);
    result.probe_fits = probes_gl + probes_l0;
    result.lambda_max = std::max(max_gl, max_l0);
    const auto values = linear_grid(plan.lambda_lower, result.lambda_max, plan.n_lambda);

    result.fold_assignments = stratified_folds(data.y, plan.k_folds, plan.seed, plan.stream);
    const auto folds = make_folds(data, result.fold_assignments, plan.k_folds, solver);

    std::vector<std::vector<int>> selected;
    result.grid1 = evaluate_grid(
        folds, values, solver, weights, base, [](double v) { return std::pair{v, 0.0}; }, &selected);
    result.cv_fits += plan.k_folds * plan.n_lambda;
    result.lambda1_opt = select_optimum(result.grid1);
    for (const auto& path : selected)
        for (std::size_t g = 1; g < path.size(); ++g)
            if (path[g] >= 0 && path[g - 1] >= 0 && path[g] > path[g - 1]) ++result.monotonicity_violations;

    const double l1 = result.lambda1_opt;
    result.grid0 = evaluate_grid(
        folds, values, solver, weights, base, [l1](double v) { return std::pair{l1, v}; }, nullptr);
    result.cv_fits += plan.k_folds * plan.n_lambda;
    result.lambda0_opt = select_optimum(result.grid0);

    const auto start = solver_start(data, solver);
    result.final_fit = fit_penalized(data, with_lambdas(base, result.lambda1_opt, result.lambda0_opt),
                                     weights, solver, ptr(start));
    return result;
}

CvResult cv_l0_only(const Dataset& data, const SolverOptions& solver, const WeightSet& weights,
                    const PenaltyConfig& base, const CvPlan& plan) {
    plan.validate();
    validate_all(solver, base);
    CvResult result;
    int probes = 0;
    result.lambda_max = find_lambda_max(data, solver, weights, base, LambdaTarget::l0, 0.0, &probes);
    result.probe_fits = probes;
    const auto values = linear_grid(plan.lambda_lower, result.lambda_max, plan.n_lambda);

    result.fold_assignments = stratified_folds(data.y, plan.k_folds, plan.seed, plan.stream);
    const auto folds = make_folds(data, result.fold_assignments, plan.k_folds, solver);
    result.grid0 = evaluate_grid(
        folds, values, solver, weights, base, [](double v) { return std::pair{0.0, v}; }, nullptr);
    result.cv_fits = plan.k_folds * plan.n_lambda;
    result.lambda1_opt = 0.0;
    result.lambda0_opt = select_optimum(result.grid0);

    const auto start = solver_start(data, solver);
    result.final_fit =
        fit_penalized(data, with_lambdas(base, 0.0, result.lambda0_opt), weights, solver, ptr(start));
    return result;
}

std::vector<FitResult> fit_path(const Dataset& data, const SolverOptions& solver,
                                const WeightSet& weights, const PenaltyConfig& base,
                                LambdaTarget which, const std::vector<double>& grid,
                                double other_lambda) {
    validate_all(solver, base);
    const auto start = solver_start(data, solver);
    std::vector<FitResult> fits(grid.size());
    const int m = static_cast<int>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (int g = 0; g < m; ++g) {
        const auto cfg = which == LambdaTarget::gl ? with_lambdas(base, grid[g], other_lambda)
                                                   : with_lambdas(base, other_lambda, grid[g]);
        fits[g] = fit_penalized(data, cfg, weights, solver, ptr(start));
    }
    return fits;
}

}  // namespace l0fgl
