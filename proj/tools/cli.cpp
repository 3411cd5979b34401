#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"

#include "l0fgl/io.hpp"
#include "l0fgl/likelihood.hpp"
#include "l0fgl/metrics.hpp"
#include "l0fgl/penalty.hpp"
#include "l0fgl/simulation.hpp"
#include "l0fgl/tuning.hpp"

namespace l0fgl::cli {

namespace {

// Thrown for failed fits when --strict is set.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string out;
    int jobs = 0;
    bool strict = false;
};

struct DataArgs {
    std::string data;
    std::string schema;
    std::string response = "y";
};

struct SolverArgs {
    std::string solver = "pirls";
    std::string weights = "plain";
    std::string start;   // empty: solver default
    double nu = 0.0;     // 0: solver default
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_text(path, text);
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

SolverOptions make_solver(const SolverArgs& a) {
    SolverOptions s;
    s.kind = parse_solver(a.solver);
    if (!a.start.empty()) {
        s.pirls.start = parse_start_value(a.start);
        s.bcd.start = s.pirls.start;
    }
    if (a.nu > 0.0) {
        s.pirls.nu = a.nu;
        s.bcd.nu = a.nu;
    }
    s.pirls.validate();
    s.bcd.validate();
    return s;
}

// Weights for the chosen scheme; adaptive weights need the ML fit, whose
// failure is a solver failure.
std::optional<WeightSet> make_weight_set(const Dataset& data, WeightScheme scheme, std::string* reason) {
    if (scheme == WeightScheme::plain) return weights_plain(data);
    const auto ml = fit_ml(data);
    if (ml.failed) {
        *reason = "ML fit for adaptive weights failed: " + ml.failure_reason;
        return std::nullopt;
    }
    return weights_adaptive(data, ml.beta);
}

void add_data_options(CLI::App* app, DataArgs& d, bool required = true) {
    app->add_option("--data", d.data, "Dataset CSV (header, one level-code column per factor)")->required(required);
    app->add_option("--schema", d.schema, "Schema JSON: [{name, num_levels, scale}, ...]")->required(required);
    app->add_option("--response", d.response, "Name of the 0/1 response column")->capture_default_str();
}

void add_solver_options(CLI::App* app, SolverArgs& s) {
    app->add_option("--solver", s.solver, "pirls or bcd")
        ->check(CLI::IsMember({"pirls", "bcd"}))
        ->capture_default_str();
    app->add_option("--weights", s.weights, "plain or adaptive")
        ->check(CLI::IsMember({"plain", "adaptive"}))
        ->capture_default_str();
    app->add_option("--start", s.start, "zero or ml (default: ml for pirls, zero for bcd)")
        ->check(CLI::IsMember({"zero", "ml"}));
    app->add_option("--nu", s.nu, "Damping step in (0, 1] (default: 0.05 for pirls, 1 for bcd)");
}

void add_common(CLI::App* app, Common& c, const std::string& out_help) {
    app->add_option("--out", c.out, out_help);
    app->add_option("--jobs", c.jobs, "Worker threads (default: available parallelism)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--strict", c.strict, "Exit with status 3 when a fit fails");
}

std::string coef_header(const ModelSchema& schema) {
    std::string h = "intercept";
    for (const auto& f : schema.factors())
        for (int r = 1; r < f.num_levels; ++r) h += "," + f.name + "_" + std::to_string(r);
    return h;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"L0-fused group lasso logistic regression for categorical covariates", "l0fgl"};
    app.require_subcommand(1);

    Common common;
    DataArgs data_args;
    SolverArgs solver_args;

    auto* fit = app.add_subcommand("fit", "Fit at fixed tuning parameters");
    double lambda1 = 0.0, lambda0 = 0.0;
    add_data_options(fit, data_args);
    add_solver_options(fit, solver_args);
    fit->add_option("--lambda1", lambda1, "Group lasso tuning parameter")->capture_default_str();
    fit->add_option("--lambda0", lambda0, "L0 fusion tuning parameter")->capture_default_str();
    add_common(fit, common, "Output JSON path (default: standard output)");

    auto* cv = app.add_subcommand("cv", "Tune both parameters by two-step cross-validation");
    int folds = 5, nlambda = 10;
    std::uint64_t seed = 0;
    bool l0_only = false;
    add_data_options(cv, data_args);
    add_solver_options(cv, solver_args);
    cv->add_option("--folds", folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000));
    cv->add_option("--nlambda", nlambda, "Grid size per parameter")->capture_default_str()->check(CLI::Range(2, 10000));
    cv->add_option("--seed", seed, "Seed for the fold assignment")->required();
    cv->add_flag("--l0-only", l0_only, "Tune lambda0 alone with lambda1 = 0");
    add_common(cv, common, "Output JSON path (default: standard output)");

    auto* metrics = app.add_subcommand("metrics", "Compare an estimate with the true coefficients");
    std::string truth_path, estimate_path, schema_path, test_path, response = "y";
    metrics->add_option("--truth", truth_path, "JSON with the true coefficients")->required();
    metrics->add_option("--estimate", estimate_path, "JSON with the estimate (fit or cv output)")->required();
    metrics->add_option("--schema", schema_path, "Schema JSON")->required();
    metrics->add_option("--test", test_path, "Held-out CSV for the predictive deviance");
    metrics->add_option("--response", response, "Response column of the test CSV")->capture_default_str();
    add_common(metrics, common, "Output JSON path (default: standard output)");

    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo study");
    std::string design = "b8", methods_text = "ml,l0_pirls,l0_fgl_pirls,l0_fgl_bcd,l0_pirls_adaptive,"
                                              "l0_fgl_pirls_adaptive,l0_fgl_bcd_adaptive";
    int sim_n = 0, reps = 50;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--design", design, "b8 or highdim")
        ->check(CLI::IsMember({"b8", "highdim"}))
        ->capture_default_str();
    simulate->add_option("--n", sim_n, "Training size (default: 1000 for b8, 100 for highdim)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--reps", reps, "Replications")->capture_default_str()->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", sim_seed, "Study seed")->required();
    simulate->add_option("--methods", methods_text, "Comma separated methods")->capture_default_str();
    simulate->add_option("--folds", folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000));
    simulate->add_option("--nlambda", nlambda, "Grid size per parameter")->capture_default_str()->check(CLI::Range(2, 10000));
    simulate->add_option("--nu", solver_args.nu, "Damping step for both solvers");
    add_common(simulate, common, "Output directory for report.json and replications.csv (default: report on standard output)");

    auto* path = app.add_subcommand("path", "Coefficient path along one tuning parameter");
    std::string target = "gl";
    double other = 0.0, lambda_max = 0.0;
    int path_n = 500;
    std::uint64_t path_seed = 1;
    add_data_options(path, data_args, false);
    add_solver_options(path, solver_args);
    path->add_option("--nlambda", nlambda, "Grid size")->capture_default_str()->check(CLI::Range(2, 100000));
    path->add_option("--target", target, "gl varies lambda1, l0 varies lambda0")
        ->check(CLI::IsMember({"gl", "l0"}))
        ->capture_default_str();
    path->add_option("--other", other, "Value of the fixed tuning parameter")->capture_default_str();
    path->add_option("--lambda-max", lambda_max, "Upper grid end (default: smallest null-model power of two)");
    path->add_option("--n", path_n, "Simulated size when no --data is given")->capture_default_str();
    path->add_option("--seed", path_seed, "Simulation seed when no --data is given")->capture_default_str();
    add_common(path, common, "Output CSV path (default: standard output)");

    auto* grid = app.add_subcommand("penalty-grid", "Penalty of a three-level factor over a grid of (beta1, beta2)");
    double grid_l1 = 1.0, grid_l0 = 1.0, range = 2.0;
    int steps = 81;
    grid->add_option("--lambda1", grid_l1, "Group lasso weight")->capture_default_str();
    grid->add_option("--lambda0", grid_l0, "L0 weight")->capture_default_str();
    grid->add_option("--range", range, "Grid covers [-range, range]^2")->capture_default_str()->check(CLI::PositiveNumber);
    grid->add_option("--steps", steps, "Points per axis")->capture_default_str()->check(CLI::Range(2, 100000));
    add_common(grid, common, "Output CSV path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUserError;
    }

    if (common.jobs > 0) omp_set_num_threads(common.jobs);

    try {
        if (*fit) {
            const auto schema = read_schema(data_args.schema);
            const auto data = read_dataset(data_args.data, schema, data_args.response);
            const auto solver = make_solver(solver_args);
            PenaltyConfig cfg;
            cfg.lambda1 = lambda1;
            cfg.lambda0 = lambda0;
            cfg.weight_scheme = parse_weight_scheme(solver_args.weights);
            cfg.validate();
            std::string reason;
            const auto weights = make_weight_set(data, cfg.weight_scheme, &reason);
            FitResult result;
            if (!weights) {
                result = FitResult::failure(CoefVector(schema), 0, reason);
            } else {
                const auto start = solver_start(data, solver);
                result = fit_penalized(data, cfg, *weights, solver, start ? &*start : nullptr);
            }
            emit(dump(to_json(result, schema)), common.out, out);
            if (result.failed && common.strict) throw SolverFailure(result.failure_reason);
        } else if (*cv) {
            const auto schema = read_schema(data_args.schema);
            const auto data = read_dataset(data_args.data, schema, data_args.response);
            const auto solver = make_solver(solver_args);
            PenaltyConfig base;
            base.weight_scheme = parse_weight_scheme(solver_args.weights);
            CvPlan plan;
            plan.k_folds = folds;
            plan.n_lambda = nlambda;
            plan.seed = seed;
            std::string reason;
            const auto weights = make_weight_set(data, base.weight_scheme, &reason);
            Json result;
            bool failed = false;
            if (!weights) {
                failed = true;
                result = Json{{"failed", true}, {"failure_reason", reason}};
            } else {
                try {
                    const auto res = l0_only ? cv_l0_only(data, solver, *weights, base, plan)
                                             : cv_two_step(data, solver, *weights, base, plan);
                    failed = res.final_fit.failed;
                    reason = res.final_fit.failure_reason;
                    result = to_json(res, schema);
                } catch (const TuningError& e) {
                    failed = true;
                    reason = e.what();
                    result = Json{{"failed", true}, {"failure_reason", reason}};
                }
            }
            emit(dump(result), common.out, out);
            if (failed && common.strict) throw SolverFailure(reason);
        } else if (*metrics) {
            const auto schema = read_schema(schema_path);
            const auto truth = coef_from_json(read_json(truth_path), schema);
            const auto estimate = coef_from_json(read_json(estimate_path), schema);
            std::optional<Dataset> test;
            if (!test_path.empty()) test = read_dataset(test_path, schema, response);
            const auto report = evaluate(estimate, truth, schema, test ? &*test : nullptr);
            emit(dump(to_json(report)), common.out, out);
        } else if (*simulate) {
            const auto spec = design == "b8" ? design_b8(sim_n > 0 ? sim_n : 1000, sim_seed, reps)
                                             : [&] {
                                                   auto s = design_highdim(sim_seed, reps);
                                                   if (sim_n > 0) s.n = sim_n;
                                                   return s;
                                               }();
            const auto methods = parse_methods(methods_text);
            StudySettings settings;
            settings.k_folds = folds;
            settings.n_lambda = nlambda;
            if (solver_args.nu > 0.0) settings.pirls.nu = settings.bcd.nu = solver_args.nu;
            const auto report = run_study(spec, methods, settings);
            const std::string json = dump(to_json(report));
            if (common.out.empty()) {
                out << json;
            } else {
                std::filesystem::create_directories(common.out);
                write_text((std::filesystem::path(common.out) / "report.json").string(), json);
                write_text((std::filesystem::path(common.out) / "replications.csv").string(),
                           replications_csv(report));
            }
            if (common.strict)
                for (const auto& m : report.methods)
                    if (m.fails > 0) throw SolverFailure(m.method.name() + " failed in some replications");
        } else if (*path) {
            if (data_args.data.empty() != data_args.schema.empty())
                throw std::invalid_argument("--data and --schema must be given together");
            Dataset data;
            if (data_args.data.empty()) {
                data = simulate_dataset(design_path(path_n, path_seed), 0).train;
            } else {
                data = read_dataset(data_args.data, read_schema(data_args.schema), data_args.response);
            }
            const auto solver = make_solver(solver_args);
            PenaltyConfig base;
            base.weight_scheme = parse_weight_scheme(solver_args.weights);
            std::string reason;
            const auto weights = make_weight_set(data, base.weight_scheme, &reason);
            if (!weights) throw SolverFailure(reason);
            const auto which = target == "gl" ? LambdaTarget::gl : LambdaTarget::l0;
            double hi = lambda_max;
            if (!(hi > 0.0)) {
                try {
                    hi = find_lambda_max(data, solver, *weights, base, which, other);
                } catch (const TuningError& e) {
                    throw SolverFailure(e.what());
                }
            }
            const auto lambdas = linear_grid(0.0, hi, nlambda);
            const auto fits = fit_path(data, solver, *weights, base, which, lambdas, other);
            std::ostringstream csv;
            csv << "lambda," << coef_header(data.schema) << ",failed\n";
            bool any_failed = false;
            for (std::size_t g = 0; g < fits.size(); ++g) {
                csv << format_double(lambdas[g]);
                for (int i = 0; i < fits[g].beta.size(); ++i) csv << ',' << format_double(fits[g].beta.flat()[i]);
                csv << ',' << (fits[g].failed ? 1 : 0) << '\n';
                any_failed |= fits[g].failed;
            }
            emit(csv.str(), common.out, out);
            if (any_failed && common.strict) throw SolverFailure("some path fits failed");
        } else if (*grid) {
            const ModelSchema schema({{"x", 3, Scale::nominal}});
            std::ostringstream csv;
            csv << "beta1,beta2,group_lasso,l0,l0_fgl\n";
            for (int a = 0; a < steps; ++a) {
                for (int b = 0; b < steps; ++b) {
                    const double b1 = -range + 2.0 * range * a / (steps - 1);
                    const double b2 = -range + 2.0 * range * b / (steps - 1);
                    const double gl = std::hypot(b1, b2);
                    const double l0 = b1 != b2 ? 1.0 : 0.0;
                    csv << format_double(b1) << ',' << format_double(b2) << ',' << format_double(gl) << ','
                        << l0 << ',' << format_double(grid_l1 * gl + grid_l0 * l0) << '\n';
                }
            }
            emit(csv.str(), common.out, out);
        }
    } catch (const SolverFailure& e) {
        err << "error: solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed JSON input: " << e.what() << '\n';
        return kExitUserError;
    }
    return kExitOk;
}

}  // namespace l0fgl::cli
