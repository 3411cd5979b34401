// OpenMP kernels against the serial reference implementation.

#include <benchmark/benchmark.h>

#include "l0fgl/kernels.hpp"
#include "l0fgl/rng.hpp"

using namespace l0fgl;

namespace {

Dataset make_data(int n) {
    ModelSchema schema({{"a", 4, Scale::nominal}, {"b", 3, Scale::ordinal}, {"c", 6, Scale::nominal},
                        {"d", 5, Scale::ordinal}, {"e", 2, Scale::nominal}});
    CounterRng rng(1, 0, Stream::train_levels);
    RowMajorMatrixXi levels(n, schema.num_factors());
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < schema.num_factors(); ++j)
            levels(i, j) = static_cast<int>(rng.below(schema.factor(j).num_levels));
        y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    return encode(levels, schema, y);
}

VectorXd filled(int size, double lo, double hi) {
    CounterRng rng(2, 0, Stream::folds);
    VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = rng.uniform(lo, hi);
    return v;
}

template <VectorXd (*Kernel)(const Dataset&, const VectorXd&)>
void linear_predictor(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)));
    const VectorXd beta = filled(data.schema.num_columns(), -1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(data, beta));
    state.SetItemsProcessed(state.iterations() * data.n());
}

template <VectorXd (*Kernel)(const Dataset&, const VectorXd&)>
void transpose_times(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)));
    const VectorXd v = filled(data.n(), -1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(data, v));
    state.SetItemsProcessed(state.iterations() * data.n());
}

template <MatrixXd (*Kernel)(const Dataset&, const VectorXd&)>
void weighted_gram(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)));
    const VectorXd w = filled(data.n(), 0.01, 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(data, w));
    state.SetItemsProcessed(state.iterations() * data.n());
}

}  // namespace

BENCHMARK(linear_predictor<kernels::reference::linear_predictor>)->Name("linear_predictor/reference")->Range(1 << 10, 1 << 20);
BENCHMARK(linear_predictor<kernels::linear_predictor>)->Name("linear_predictor/openmp")->Range(1 << 10, 1 << 20);
BENCHMARK(transpose_times<kernels::reference::transpose_times>)->Name("transpose_times/reference")->Range(1 << 10, 1 << 20);
BENCHMARK(transpose_times<kernels::transpose_times>)->Name("transpose_times/openmp")->Range(1 << 10, 1 << 20);
BENCHMARK(weighted_gram<kernels::reference::weighted_gram>)->Name("weighted_gram/reference")->Range(1 << 10, 1 << 18);
BENCHMARK(weighted_gram<kernels::weighted_gram>)->Name("weighted_gram/openmp")->Range(1 << 10, 1 << 18);

BENCHMARK_MAIN();
