#pragma once

#include <string>

#include "l0fgl/data_model.hpp"

namespace l0fgl {

/// Output of every fitting routine. Failures are reported here rather than
/// thrown so that replication studies can count them.
struct FitResult {
    CoefVector beta;
    bool converged = false;
    int iterations = 0;
    // -L_n + exact penalty at `beta` for PIRLS and ML; BCD reports the same
    // quantity on its 1/n likelihood scale.
    double objective = 0.0;
    bool failed = false;
    std::string failure_reason;
    // Non-fatal notes, e.g. an inner quasi-Newton solve that hit its limit.
    std::string note;

    static FitResult failure(CoefVector beta, int iterations, std::string reason) {
        FitResult r;
        r.beta = std::move(beta);
        r.iterations = iterations;
        r.failed = true;
        r.failure_reason = std::move(reason);
        return r;
    }
};

}  // namespace l0fgl
