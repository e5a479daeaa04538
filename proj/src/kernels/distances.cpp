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

#include <cmath>

#include "timbremap/error.hpp"
#include "timbremap/kernels.hpp"

namespace timbremap::kernels {

Matrix pairwise_distances_serial(const Matrix& points) {
    const auto n = points.rows();
    const auto dim = points.cols();
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < dim; ++k) {
                const double d = points(i, k) - points(j, k);
                acc += d * d;
            }
            out(i, j) = std::sqrt(acc);
        }
    }
    return out;
}

Matrix pairwise_distances_omp(const Matrix& points) {
    const auto n = points.rows();
    const auto dim = points.cols();
    Matrix out(n, n);
    const double* data = points.data();
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* a = data + i * dim;
        out(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double* b = data + j * dim;
            double acc = 0.0;
            for (Eigen::Index k = 0; k < dim; ++k) {
                const double d = a[k] - b[k];
                acc += d * d;
            }
            const double dist = std::sqrt(acc);
            out(i, j) = dist;
            out(j, i) = dist;
        }
    }
    return out;
}

Matrix pairwise_distances(const Matrix& points, Exec exec) {
    return exec == Exec::serial ? pairwise_distances_serial(points) : pairwise_distances_omp(points);
}

}  // namespace timbremap::kernels
