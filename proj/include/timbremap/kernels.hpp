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

// Data-parallel inner loops. Each kernel has an OpenMP implementation and a
// plain serial reference; the two must agree bit for bit, which the kernel
// tests assert and the benchmark target compares for speed.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace timbremap {

enum class Exec { serial, parallel };

/// Row-major samples x features.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace kernels {

/// Symmetric Euclidean distance matrix between the rows of `points`.
Matrix pairwise_distances(const Matrix& points, Exec exec = Exec::parallel);
Matrix pairwise_distances_serial(const Matrix& points);
Matrix pairwise_distances_omp(const Matrix& points);

/// Sample-clock frame layout shared by all channels of one analysis.
struct FrameGrid {
    std::size_t n_frames = 0;
    double hop = 0.0;           // samples per frame
    std::size_t half_window = 0;  // roughness window half-width, samples
};

struct ChannelGeometry {
    double center_hz = 0.0;
    double bandwidth_hz = 0.0;
};

/// Per-channel reductions of one gammatone subband.
struct ChannelFeatures {
    double mean_power = 0.0;
    double envelope_energy = 0.0;            // mean squared smoothed envelope
    std::vector<double> envelope_frames;     // frame means of the 20 Hz envelope
    std::vector<double> modulation_frames;   // windowed mean 20-170 Hz envelope energy
};

/// Runs the gammatone filter for one channel and reduces it to frame
/// features. Pure; shared by both filterbank kernels.
ChannelFeatures process_channel(std::span<const double> signal, int sample_rate, ChannelGeometry channel,
                                const FrameGrid& grid);

std::vector<ChannelFeatures> filterbank_channels(std::span<const double> signal, int sample_rate,
                                                 std::span<const ChannelGeometry> channels, const FrameGrid& grid,
                                                 Exec exec = Exec::parallel);
std::vector<ChannelFeatures> filterbank_channels_serial(std::span<const double> signal, int sample_rate,
                                                        std::span<const ChannelGeometry> channels,
                                                        const FrameGrid& grid);
std::vector<ChannelFeatures> filterbank_channels_omp(std::span<const double> signal, int sample_rate,
                                                     std::span<const ChannelGeometry> channels,
                                                     const FrameGrid& grid);

/// Observations grouped by cluster (participant). Bootstrap resamples
/// clusters with replacement, then observations within each drawn cluster.
using Clusters = std::vector<std::vector<double>>;

/// One mean per resample. Resample r draws from a stream seeded by
/// derive_seed(seed, r), so results are independent of thread count.
std::vector<double> cluster_bootstrap_means(const Clusters& clusters, std::size_t n_resamples, std::uint64_t seed,
                                            Exec exec = Exec::parallel);
std::vector<double> cluster_bootstrap_means_serial(const Clusters& clusters, std::size_t n_resamples,
                                                   std::uint64_t seed);
std::vector<double> cluster_bootstrap_means_omp(const Clusters& clusters, std::size_t n_resamples,
                                                std::uint64_t seed);

/// Mean of one resample, shared by both bootstrap kernels.
double cluster_resample_mean(const Clusters& clusters, std::uint64_t resample_seed);

}  // namespace kernels
}  // namespace timbremap
