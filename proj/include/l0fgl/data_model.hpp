#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace l0fgl {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when level codes or schema entries are out of range.
class SchemaError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when array shapes disagree.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class Scale { nominal, ordinal };

std::string to_string(Scale scale);
Scale parse_scale(const std::string& text);

struct FactorSpec {
    std::string name;
    int num_levels = 2;  // levels are coded 0..num_levels-1, 0 is the reference
    Scale scale = Scale::nominal;

    int num_params() const { return num_levels - 1; }
};

/// Ordered list of categorical covariates and the resulting column layout:
/// intercept, then levels 1..p_1 of factor 1, then factor 2, and so on.
class ModelSchema {
  public:
    ModelSchema() = default;
    explicit ModelSchema(std::vector<FactorSpec> factors);

    int num_factors() const { return static_cast<int>(factors_.size()); }
    int num_params() const { return starts_.back() - 1; }
    int num_columns() const { return starts_.back(); }

    const FactorSpec& factor(int j) const { return factors_.at(j); }
    const std::vector<FactorSpec>& factors() const { return factors_; }

    /// Column of level 1 of factor j in the design matrix.
    int start(int j) const { return starts_[j]; }
    int block_size(int j) const { return factors_[j].num_params(); }

  private:
    std::vector<FactorSpec> factors_;
    std::vector<int> starts_{1};
};

struct LevelPair {
    int r;
    int s;
    bool operator==(const LevelPair&) const = default;
};

/// Level differences entering the fusion penalty of factor j. Nominal factors
/// compare all pairs 0 <= r < s <= p_j, ordinal factors only adjacent levels.
std::vector<LevelPair> difference_set(const ModelSchema& schema, int j);

/// Intercept plus one coefficient block per factor, stored flat in design
/// column order.
class CoefVector {
  public:
    CoefVector() = default;
    explicit CoefVector(const ModelSchema& schema);
    CoefVector(const ModelSchema& schema, VectorXd flat);

    double intercept() const { return values_[0]; }
    double& intercept() { return values_[0]; }

    int num_blocks() const { return static_cast<int>(starts_.size()) - 1; }
    int block_size(int j) const { return starts_[j + 1] - starts_[j]; }

    auto block(int j) { return values_.segment(starts_[j], block_size(j)); }
    auto block(int j) const { return values_.segment(starts_[j], block_size(j)); }

    /// Coefficient of level r of factor j; level 0 is the reference and reads as 0.
    double level(int j, int r) const { return r == 0 ? 0.0 : values_[starts_[j] + r - 1]; }

    const VectorXd& flat() const { return values_; }
    VectorXd& flat() { return values_; }
    int size() const { return static_cast<int>(values_.size()); }

  private:
    VectorXd values_;
    std::vector<int> starts_;
};

/// Dummy-coded design with reference level 0. `levels` keeps the raw codes so
/// per-level counts and the one-hot column index never need to be recovered
/// from X.
struct Dataset {
    ModelSchema schema;
    MatrixXd X;                 // n x (p+1), column 0 is all ones
    VectorXd y;                 // 0/1 responses
    RowMajorMatrixXi levels;    // n x J raw level codes
    RowMajorMatrixXi active;    // n x J design column of the observed level, -1 for the reference

    int n() const { return static_cast<int>(y.size()); }

    /// n_j^(r) for r = 0..p_j.
    std::vector<int> level_counts(int j) const;

    Dataset subset(const std::vector<int>& rows) const;
};

Dataset encode(const RowMajorMatrixXi& raw_levels, const ModelSchema& schema, const VectorXd& y);

}  // namespace l0fgl
