#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "l0fgl/bcd.hpp"
#include "l0fgl/data_model.hpp"
#include "l0fgl/fit_result.hpp"
#include "l0fgl/penalty.hpp"
#include "l0fgl/pirls.hpp"

namespace l0fgl {

class TuningError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SolverKind { pirls, bcd };

std::string to_string(SolverKind kind);
SolverKind parse_solver(const std::string& text);

struct SolverOptions {
    SolverKind kind = SolverKind::pirls;
    PirlsSettings pirls;
    BcdSettings bcd;
};

/// Start vector implied by the solver's start setting: ml_start when the ML
/// start is requested, otherwise nothing (zero start).
std::optional<VectorXd> solver_start(const Dataset& data, const SolverOptions& solver);

FitResult fit_penalized(const Dataset& data, const PenaltyConfig& cfg, const WeightSet& weights,
                        const SolverOptions& solver, const VectorXd* initial = nullptr);

/// True when every factor block is exactly zero.
bool is_null_model(const CoefVector& beta);

enum class LambdaTarget { gl, l0 };

/// Smallest 2^k, k = 0..30, at which the fit is the null model. For `gl` the
/// probe is (lambda1 = 2^k, lambda0 = other_lambda); for `l0` it is
/// (lambda1 = other_lambda, lambda0 = 2^k). Throws TuningError when no probe
/// succeeds. `probe_fits`, when non-null, receives the number of fits.
double find_lambda_max(const Dataset& data, const SolverOptions& solver, const WeightSet& weights,
                       const PenaltyConfig& base, LambdaTarget which, double other_lambda = 0.0,
                       int* probe_fits = nullptr);

struct CvPlan {
    int k_folds = 5;
    int n_lambda = 10;
    double lambda_lower = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;  // distinguishes replications sharing a seed

    void validate() const;
};

struct GridPoint {
    double lambda = 0.0;
    double mean_deviance = 0.0;      // +inf when some fold failed
    std::vector<double> fold_deviance;
    int failed_folds = 0;
};

struct CvResult {
    double lambda1_opt = 0.0;
    double lambda0_opt = 0.0;
    double lambda_max = 0.0;
    std::vector<GridPoint> grid1;    // lambda1 grid at lambda0 = 0
    std::vector<GridPoint> grid0;    // lambda0 grid at lambda1 = lambda1_opt
    std::vector<int> fold_assignments;
    int cv_fits = 0;
    int probe_fits = 0;
    int monotonicity_violations = 0;  // selected-factor count rising along grid1
    FitResult final_fit;              // refit on all data at the optimum
};

/// Balanced folds stratified by response: fold sizes differ by at most one
/// and every fold holds at least one observation of each class that has at
/// least k members. Throws TuningError when y has fewer than k entries.
std::vector<int> stratified_folds(const VectorXd& y, int k, std::uint64_t seed,
                                  std::uint64_t stream = 0);

/// Held-out predictive deviance of a fitted model.
double predictive_deviance_heldout(const FitResult& fit, const Dataset& heldout);

/// Two-step cross-validation: lambda1 on a linear grid with lambda0 = 0, then
/// lambda0 on the same grid with lambda1 fixed at its optimum, then a refit on
/// all data. The grid runs from plan.lambda_lower to the larger of the group
/// lasso and L0 lambda_max searches. Throws TuningError when tuning cannot
/// proceed.
CvResult cv_two_step(const Dataset& data, const SolverOptions& solver, const WeightSet& weights,
                     const PenaltyConfig& base, const CvPlan& plan);

/// One-dimensional CV over lambda0 with lambda1 = 0 (pure L0 fusion).
CvResult cv_l0_only(const Dataset& data, const SolverOptions& solver, const WeightSet& weights,
                    const PenaltyConfig& base, const CvPlan& plan);

std::vector<double> linear_grid(double lo, double hi, int count);

/// Fits along a grid of one tuning parameter with the other held fixed.
std::vector<FitResult> fit_path(const Dataset& data, const SolverOptions& solver,
                                const WeightSet& weights, const PenaltyConfig& base,
                                LambdaTarget which, const std::vector<double>& grid,
                                double other_lambda = 0.0);

}  // namespace l0fgl
