#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "l0fgl/data_model.hpp"
#include "l0fgl/fit_result.hpp"
#include "l0fgl/metrics.hpp"
#include "l0fgl/simulation.hpp"
#include "l0fgl/tuning.hpp"

namespace l0fgl {

using Json = nlohmann::ordered_json;

/// Unreadable or malformed input files. The message names the file.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Schema sidecar: [{"name": ..., "num_levels": ..., "scale": "nominal"|"ordinal"}, ...]
ModelSchema schema_from_json(const Json& j);
Json schema_to_json(const ModelSchema& schema);
ModelSchema read_schema(const std::string& path);

/// CSV with a header row, one integer column per schema factor (matched by
/// name, any order) and a 0/1 response column. Other columns are ignored.
Dataset read_dataset(const std::string& path, const ModelSchema& schema,
                     const std::string& response = "y");
void write_dataset(const std::string& path, const Dataset& data, const std::string& response = "y");

/// {"intercept": b0, "beta": [flat, intercept first], "blocks": {name: [...]}}
Json coef_to_json(const CoefVector& beta, const ModelSchema& schema);
/// Accepts a bare array, an object with a flat "beta" array, or a fit/cv
/// result holding one.
CoefVector coef_from_json(const Json& j, const ModelSchema& schema);

Json to_json(const FitResult& fit, const ModelSchema& schema);
Json to_json(const CvResult& cv, const ModelSchema& schema);
Json to_json(const EvalReport& report);
Json to_json(const ReplicationReport& report);

/// One row per (method, replication) with every metric.
std::string replications_csv(const ReplicationReport& report);

Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace l0fgl
