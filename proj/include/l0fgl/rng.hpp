#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace l0fgl {

/// Independent random streams used by the simulation harness.
enum class Stream : std::uint64_t {
    level_probs = 1,
    train_levels = 2,
    train_response = 3,
    test_levels = 4,
    test_response = 5,
    folds = 6,
};

/// Counter-based generator: draw k of the stream keyed by (seed, replication,
/// stream) is a fixed function of those four integers, so streams never
/// overlap and results do not depend on scheduling.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t replication, Stream stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Index drawn with probabilities proportional to `probs`.
    int categorical(const std::vector<double>& probs);
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace l0fgl
