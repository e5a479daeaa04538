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

#include "timbremap/kernels.hpp"
#include "timbremap/random.hpp"

namespace timbremap::kernels {

double cluster_resample_mean(const Clusters& clusters, std::uint64_t resample_seed) {
    Rng rng(resample_seed);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t draw = 0; draw < clusters.size(); ++draw) {
        const auto& cluster = clusters[rng.below(clusters.size())];
        for (std::size_t k = 0; k < cluster.size(); ++k) {
            sum += cluster[rng.below(cluster.size())];
        }
        count += cluster.size();
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

std::vector<double> cluster_bootstrap_means_serial(const Clusters& clusters, std::size_t n_resamples,
                                                   std::uint64_t seed) {
    std::vector<double> out(n_resamples);
    for (std::size_t r = 0; r < n_resamples; ++r) {
        out[r] = cluster_resample_mean(clusters, derive_seed(seed, r));
    }
    return out;
}

std::vector<double> cluster_bootstrap_means_omp(const Clusters& clusters, std::size_t n_resamples,
                                                std::uint64_t seed) {
    std::vector<double> out(n_resamples);
    const auto n = static_cast<std::int64_t>(n_resamples);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        out[static_cast<std::size_t>(r)] = cluster_resample_mean(clusters, derive_seed(seed, static_cast<std::uint64_t>(r)));
    }
    return out;
}

std::vector<double> cluster_bootstrap_means(const Clusters& clusters, std::size_t n_resamples, std::uint64_t seed,
                                            Exec exec) {
    return exec == Exec::serial ? cluster_bootstrap_means_serial(clusters, n_resamples, seed)
                                : cluster_bootstrap_means_omp(clusters, n_resamples, seed);
}

}  // namespace timbremap::kernels
