#include "l0fgl/threshold.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace l0fgl {

CoefVector threshold_solution(const CoefVector& beta, const ModelSchema& schema, double eps_fuse,
                              double eps_zero) {
    if (!(eps_fuse > 0.0) || !(eps_zero > 0.0))
        throw std::invalid_argument("threshold tolerances must be positive");

    CoefVector out = beta;
    for (int j = 0; j < schema.num_factors(); ++j) {
        auto block = out.block(j);
        const int pj = static_cast<int>(block.size());

        // Index 0 is the reference level.
        std::vector<double> values(pj + 1, 0.0);
        for (int r = 1; r <= pj; ++r) values[r] = block[r - 1];
        std::vector<int> order(pj + 1);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return values[a] < values[b]; });

        std::size_t first = 0;
        while (first < order.size()) {
            std::size_t last = first + 1;
            while (last < order.size() && values[order[last]] - values[order[last - 1]] < eps_fuse)
                ++last;
            bool has_reference = false;
            double sum = 0.0;
            for (std::size_t k = first; k < last; ++k) {
                has_reference |= order[k] == 0;
                sum += values[order[k]];
            }
            const double fused = has_reference ? 0.0 : sum / static_cast<double>(last - first);
            if (last - first > 1) {
                for (std::size_t k = first; k < last; ++k)
                    if (order[k] != 0) block[order[k] - 1] = fused;
            }
            first = last;
        }

        if (pj > 0 && block.cwiseAbs().maxCoeff() < eps_zero) block.setZero();
    }
    return out;
}

}  // namespace l0fgl
