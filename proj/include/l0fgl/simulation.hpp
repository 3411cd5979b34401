#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l0fgl/data_model.hpp"
#include "l0fgl/metrics.hpp"
#include "l0fgl/penalty.hpp"
#include "l0fgl/tuning.hpp"

namespace l0fgl {

struct DesignSpec {
    std::string name;
    ModelSchema schema;
    CoefVector beta_star;
    int n = 0;                                    // training size; the test set has the same size
    std::vector<std::vector<double>> level_probs;  // per factor, sums to 1
    int r_replications = 50;
    std::uint64_t seed = 0;

    void validate() const;
};

/// 8 ordinal factors with 4 levels, 4 of them influential. Level
/// probabilities are 4 uniforms on [0.12, 0.44] per factor, normalized.
DesignSpec design_b8(int n, std::uint64_t seed, int replications = 50);

/// 60 ordinal factors (50 with 4 levels, 10 with 3), equal level
/// probabilities, n = 100, first 5 factors influential.
DesignSpec design_highdim(std::uint64_t seed, int replications = 50);

/// Two nominal factors with 4 and 3 levels and equal probabilities, used for
/// coefficient paths.
DesignSpec design_path(int n, std::uint64_t seed);

struct SimulatedData {
    Dataset train;
    Dataset test;
};

SimulatedData simulate_dataset(const DesignSpec& spec, int replication);

enum class MethodKind { ml, l0_pirls, l0_fgl_pirls, l0_fgl_bcd };

struct Method {
    MethodKind kind = MethodKind::ml;
    WeightScheme weights = WeightScheme::plain;

    /// "ml", "l0_fgl_bcd", "l0_fgl_bcd_adaptive", ...
    std::string name() const;
};

Method parse_method(const std::string& text);
/// Comma separated list of method names.
std::vector<Method> parse_methods(const std::string& text);

struct StudySettings {
    int k_folds = 5;
    int n_lambda = 10;
    PirlsSettings pirls;
    BcdSettings bcd;
    PenaltyConfig penalty;  // lambdas are ignored; approximation constants are used
};

struct MethodRecord {
    int replication = 0;
    bool failed = false;
    std::string failure_reason;
    EvalReport eval;
    double lambda1 = 0.0;
    double lambda0 = 0.0;
};

struct Summary {
    double mean = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
};

struct MethodSummary {
    Method method;
    int replications = 0;
    int fails = 0;
    double proportion_of_fails = 0.0;
    // Aggregates over non-failed replications; empty when every replication failed.
    std::optional<Summary> msec;
    std::optional<Summary> pred_deviance;
    Rate fp_sel, fn_sel, fp_fus, fn_fus;
    std::optional<double> os, ps;
    std::vector<MethodRecord> records;
};

struct ReplicationReport {
    std::string design;
    int n = 0;
    int replications = 0;
    std::uint64_t seed = 0;
    std::vector<MethodSummary> methods;
};

/// Fits one method on one simulated replication, tuning it by cross-validation
/// with folds keyed by (spec.seed, replication).
MethodRecord run_method(const SimulatedData& data, const DesignSpec& spec, int replication,
                        const Method& method, const StudySettings& settings);

/// Every (replication, method) pair, evaluated against the truth and an
/// independent test set. Results do not depend on the number of threads.
ReplicationReport run_study(const DesignSpec& spec, const std::vector<Method>& methods,
                            const StudySettings& settings = {});

/// Linear-interpolated sample quantile, q in [0, 1]. Requires a non-empty input.
double quantile(std::vector<double> values, double q);

}  // namespace l0fgl
