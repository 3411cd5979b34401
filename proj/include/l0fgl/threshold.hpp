#pragma once

#include "l0fgl/data_model.hpp"

namespace l0fgl {

inline constexpr double kDefaultFuseEps = 1e-3;
inline constexpr double kDefaultZeroEps = 1e-3;

/// Turns a smooth-surrogate solution into one with exact ties and zeros.
///
/// Within each factor the level coefficients, together with the reference at
/// 0, are clustered by single linkage on gaps below `eps_fuse`. Clusters are
/// replaced by their mean, except that a cluster containing the reference is
/// set to 0. A block whose largest remaining magnitude is below `eps_zero` is
/// zeroed. The intercept is left alone.
CoefVector threshold_solution(const CoefVector& beta, const ModelSchema& schema,
                              double eps_fuse = kDefaultFuseEps,
                              double eps_zero = kDefaultZeroEps);

}  // namespace l0fgl
