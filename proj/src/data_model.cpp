#include "l0fgl/data_model.hpp"

#include <sstream>

namespace l0fgl {

std::string to_string(Scale scale) {
    return scale == Scale::ordinal ? "ordinal" : "nominal";
}

Scale parse_scale(const std::string& text) {
    if (text == "nominal") return Scale::nominal;
    if (text == "ordinal") return Scale::ordinal;
    throw SchemaError("unknown factor scale '" + text + "' (expected nominal or ordinal)");
}

ModelSchema::ModelSchema(std::vector<FactorSpec> factors) : factors_(std::move(factors)) {
    starts_.reserve(factors_.size() + 1);
    for (const auto& f : factors_) {
        if (f.num_levels < 2) {
            throw SchemaError("factor '" + f.name + "' needs at least 2 levels, got " +
                              std::to_string(f.num_levels));
        }
        starts_.push_back(starts_.back() + f.num_params());
    }
}

std::vector<LevelPair> difference_set(const ModelSchema& schema, int j) {
    const auto& f = schema.factor(j);
    const int pj = f.num_params();
    std::vector<LevelPair> pairs;
    if (f.scale == Scale::ordinal) {
        pairs.reserve(pj);
        for (int r = 1; r <= pj; ++r) pairs.push_back({r - 1, r});
    } else {
        pairs.reserve(pj * (pj + 1) / 2);
        for (int r = 0; r < pj; ++r)
            for (int s = r + 1; s <= pj; ++s) pairs.push_back({r, s});
    }
    return pairs;
}

CoefVector::CoefVector(const ModelSchema& schema)
    : CoefVector(schema, VectorXd::Zero(schema.num_columns())) {}

CoefVector::CoefVector(const ModelSchema& schema, VectorXd flat) : values_(std::move(flat)) {
    if (values_.size() != schema.num_columns()) {
        std::ostringstream msg;
        msg << "coefficient vector has length " << values_.size() << ", schema expects "
            << schema.num_columns();
        throw DimensionError(msg.str());
    }
    starts_.reserve(schema.num_factors() + 1);
    for (int j = 0; j < schema.num_factors(); ++j) starts_.push_back(schema.start(j));
    starts_.push_back(schema.num_columns());
}

std::vector<int> Dataset::level_counts(int j) const {
    std::vector<int> counts(schema.factor(j).num_levels, 0);
    for (int i = 0; i < n(); ++i) ++counts[levels(i, j)];
    return counts;
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
    RowMajorMatrixXi sub_levels(rows.size(), levels.cols());
    VectorXd sub_y(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        sub_levels.row(k) = levels.row(rows[k]);
        sub_y[k] = y[rows[k]];
    }
    return encode(sub_levels, schema, sub_y);
}

Dataset encode(const RowMajorMatrixXi& raw_levels, const ModelSchema& schema, const VectorXd& y) {
    const int n = static_cast<int>(raw_levels.rows());
    const int J = schema.num_factors();
    if (raw_levels.cols() != J) {
        throw DimensionError("level matrix has " + std::to_string(raw_levels.cols()) +
                             " columns, schema has " + std::to_string(J) + " factors");
    }
    if (y.size() != n) {
        throw DimensionError("response has length " + std::to_string(y.size()) + ", expected " +
                             std::to_string(n));
    }

    Dataset data;
    data.schema = schema;
    data.levels = raw_levels;
    data.y = y;
    data.X = MatrixXd::Zero(n, schema.num_columns());
    data.X.col(0).setOnes();
    data.active.resize(n, J);
    for (int i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw SchemaError("response at row " + std::to_string(i) + " is not 0/1");
        }
        for (int j = 0; j < J; ++j) {
            const int level = raw_levels(i, j);
            if (level < 0 || level >= schema.factor(j).num_levels) {
                std::ostringstream msg;
                msg << "level " << level << " at row " << i << " is out of range for factor '"
                    << schema.factor(j).name << "' with " << schema.factor(j).num_levels << " levels";
                throw SchemaError(msg.str());
            }
            if (level == 0) {
                data.active(i, j) = -1;
            } else {
                const int col = schema.start(j) + level - 1;
                data.active(i, j) = col;
                data.X(i, col) = 1.0;
            }
        }
    }
    return data;
}

}  // namespace l0fgl
