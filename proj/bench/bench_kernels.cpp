// Copyright 2026 The timbremap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP for each kernel. Run with
// --benchmark_filter to pick one; OMP_NUM_THREADS sets the team size.

#include <benchmark/benchmark.h>

#include <cmath>

#include "timbremap/cochlea.hpp"
#include "timbremap/kernels.hpp"
#include "timbremap/random.hpp"

using namespace timbremap;
using namespace timbremap::kernels;

namespace {

Matrix points(Eigen::Index n) {
    Rng rng(1);
    Matrix m(n, 30);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

struct Bank {
    std::vector<double> signal;
    std::vector<ChannelGeometry> channels;
    FrameGrid grid;
};

const Bank& bank() {
    static const Bank b = [] {
        Bank out;
        Rng rng(2);
        out.signal.resize(kDefaultSampleRate * 2);
        for (std::size_t i = 0; i < out.signal.size(); ++i) {
            out.signal[i] = std::sin(0.17 * static_cast<double>(i)) + 0.2 * rng.normal();
        }
        const Filterbank fb = make_filterbank();
        for (std::size_t c = 0; c < fb.n_channels(); ++c) out.channels.push_back({fb.center_freqs[c], fb.bandwidths[c]});
        const double hop = kDefaultSampleRate / kDefaultFrameRate;
        out.grid = {static_cast<std::size_t>(out.signal.size() / hop), hop, 400};
        return out;
    }();
    return b;
}

Clusters clusters() {
    Rng rng(3);
    Clusters c(20);
    for (auto& v : c) {
        v.resize(40);
        for (double& x : v) x = rng.normal(10.0, 2.0);
    }
    return c;
}

void BM_distances_serial(benchmark::State& state) {
    const Matrix p = points(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pairwise_distances_serial(p));
}
void BM_distances_omp(benchmark::State& state) {
    const Matrix p = points(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pairwise_distances_omp(p));
}

void BM_filterbank_serial(benchmark::State& state) {
    const Bank& b = bank();
    for (auto _ : state) benchmark::DoNotOptimize(filterbank_channels_serial(b.signal, kDefaultSampleRate, b.channels, b.grid));
}
void BM_filterbank_omp(benchmark::State& state) {
    const Bank& b = bank();
    for (auto _ : state) benchmark::DoNotOptimize(filterbank_channels_omp(b.signal, kDefaultSampleRate, b.channels, b.grid));
}

void BM_bootstrap_serial(benchmark::State& state) {
    const Clusters c = clusters();
    for (auto _ : state) benchmark::DoNotOptimize(cluster_bootstrap_means_serial(c, 2000, 7));
}
void BM_bootstrap_omp(benchmark::State& state) {
    const Clusters c = clusters();
    for (auto _ : state) benchmark::DoNotOptimize(cluster_bootstrap_means_omp(c, 2000, 7));
}

}  // namespace

BENCHMARK(BM_distances_serial)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_distances_omp)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_filterbank_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_filterbank_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bootstrap_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bootstrap_omp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
