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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "timbremap/cochlea.hpp"
#include "timbremap/kernels.hpp"

namespace timbremap {

struct FeatureVector {
    std::string source_id;
    std::vector<double> values;
};

/// Stacks feature vectors as matrix rows; all must share one length.
Matrix to_matrix(std::span<const FeatureVector> vectors);

// --- PCA ------------------------------------------------------------------

struct PcaModel {
    Eigen::VectorXd mean;
    Matrix components;                  // d_pca x dim, orthonormal rows
    Eigen::VectorXd explained_variance; // nonincreasing

    std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
    std::size_t n_components() const { return static_cast<std::size_t>(components.rows()); }
};

/// Top principal components of the rows of `data` via eigendecomposition of
/// the sample covariance. Each component's sign is fixed so that its largest
/// magnitude entry is positive.
PcaModel pca_fit(const Matrix& data, std::size_t d_pca);

std::vector<double> pca_transform(const PcaModel& model, std::span<const double> vector);
Matrix pca_transform(const PcaModel& model, const Matrix& data);
std::vector<double> pca_inverse(const PcaModel& model, std::span<const double> coefficients);

// --- timbre feature vectors ----------------------------------------------

struct FeatureConfig {
    std::size_t d_pca = 10;
    std::size_t time_points = 200;  // time-series profiles are resampled to this length
};

/// Fixed-length inputs for the three profile PCAs.
struct ProfileBlocks {
    Matrix spectral;
    Matrix roughness;
    Matrix temporal;
};

ProfileBlocks profile_blocks(std::span<const TimbreProfile> profiles, std::size_t time_points);

/// One PCA per profile type, each block scaled to unit total variance, then
/// concatenated as (spectral, roughness, temporal).
std::vector<FeatureVector> concat_features(std::span<const TimbreProfile> profiles,
                                           std::span<const std::string> ids, const FeatureConfig& config = {});

// --- neighbor embedding --------------------------------------------------

struct UmapParams {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    std::size_t n_epochs = 500;
    double spread = 1.0;
    std::size_t negative_sample_rate = 5;
    double learning_rate = 1.0;
};

struct Embedding2D {
    std::vector<std::string> ids;
    std::vector<std::array<double, 2>> coords;
    std::uint64_t seed = 0;
    UmapParams params;
};

struct KnnGraph {
    std::size_t k = 0;
    std::vector<std::size_t> indices;  // n x k, row-major, nearest first
    std::vector<double> distances;     // n x k
};

/// Exact k nearest neighbors (self excluded), ties broken by index.
KnnGraph exact_knn(const Matrix& distances, std::size_t k);

struct NeighborScale {
    double rho = 0.0;    // distance to nearest neighbor
    double sigma = 1.0;  // calibrated bandwidth
};

/// Solves sum_j exp(-max(0, d_ij - rho_i) / sigma_i) = log2(k) per point.
std::vector<NeighborScale> calibrate_scales(const KnnGraph& graph);

struct WeightedEdge {
    std::size_t head = 0;
    std::size_t tail = 0;
    double weight = 0.0;
};

/// Symmetrized membership graph (a + b - ab), both directions of every
/// undirected edge, ordered by (head, tail).
std::vector<WeightedEdge> fuzzy_graph(const KnnGraph& graph, std::span<const NeighborScale> scales);

/// Least-squares fit of 1 / (1 + a d^(2b)) to the min_dist/spread target curve.
std::pair<double, double> fit_ab(double spread, double min_dist);

Embedding2D embed(std::span<const FeatureVector> vectors, const UmapParams& params, std::uint64_t seed,
                  Exec knn_exec = Exec::parallel);

/// 1 minus the normalized rank penalty of low-dimensional neighbors that are
/// not high-dimensional neighbors.
double trustworthiness(std::span<const FeatureVector> high, const Embedding2D& low, std::size_t k);
double trustworthiness(const Matrix& high, const Matrix& low, std::size_t k);

}  // namespace timbremap
