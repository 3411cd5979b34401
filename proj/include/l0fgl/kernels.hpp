#pragma once

#include "l0fgl/data_model.hpp"

// Design-matrix products used by every solver. The default kernels exploit
// the one-hot layout (at most one active column per factor and row) and are
// OpenMP-parallel. Work is split so that each output entry is accumulated by
// a single thread in row order, which keeps results bit-identical for any
// thread count.
//
// The dense serial versions in `reference` operate on X directly and exist
// for tests and the benchmark.

namespace l0fgl::kernels {

/// X * beta
VectorXd linear_predictor(const Dataset& data, const VectorXd& beta);

/// X^T * v
VectorXd transpose_times(const Dataset& data, const VectorXd& v);

/// X^T diag(w) X
MatrixXd weighted_gram(const Dataset& data, const VectorXd& w);

/// Per-level sums of w over the rows of factor j: the diagonal of
/// X_j^T diag(w) X_j, which has no off-diagonal entries.
VectorXd block_weight_sums(const Dataset& data, int j, const VectorXd& w);

namespace reference {

VectorXd linear_predictor(const Dataset& data, const VectorXd& beta);
VectorXd transpose_times(const Dataset& data, const VectorXd& v);
MatrixXd weighted_gram(const Dataset& data, const VectorXd& w);

}  // namespace reference

}  // namespace l0fgl::kernels
