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

#include "timbremap/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

namespace {

constexpr double kSpectralFloor = 1e-12;
constexpr double kMinSigmaScale = 1e-3;
constexpr double kGradientClip = 4.0;

double clip(double v) { return std::clamp(v, -kGradientClip, kGradientClip); }

}  // namespace

Matrix to_matrix(std::span<const FeatureVector> vectors) {
    require(!vectors.empty(), ErrorKind::parameter, "no feature vectors");
    const std::size_t dim = vectors.front().values.size();
    Matrix m(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        require(vectors[i].values.size() == dim, ErrorKind::parameter, "feature vectors differ in length");
        for (std::size_t k = 0; k < dim; ++k) {
            const double v = vectors[i].values[k];
            require(std::isfinite(v), ErrorKind::parameter, "non-finite feature value in " + vectors[i].source_id);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
        }
    }
    return m;
}

PcaModel pca_fit(const Matrix& data, std::size_t d_pca) {
    const auto n = static_cast<std::size_t>(data.rows());
    const auto dim = static_cast<std::size_t>(data.cols());
    require(n >= 2, ErrorKind::parameter, "PCA needs at least two vectors");
    require(d_pca >= 1 && d_pca <= std::min(n - 1, dim), ErrorKind::parameter,
            "d_pca must lie in [1, min(n - 1, dim)]");

    bool identical = true;
    for (Eigen::Index r = 1; r < data.rows() && identical; ++r) identical = data.row(r) == data.row(0);
    if (identical) fail(ErrorKind::zero_variance, "all vectors are identical");

    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    const Matrix centered = data.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    if (!(cov.trace() > 0.0)) fail(ErrorKind::zero_variance, "data has no variance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) fail(ErrorKind::parameter, "covariance eigendecomposition failed");
    // Eigen returns ascending eigenvalues.
    model.components.resize(static_cast<Eigen::Index>(d_pca), static_cast<Eigen::Index>(dim));
    model.explained_variance.resize(static_cast<Eigen::Index>(d_pca));
    for (std::size_t c = 0; c < d_pca; ++c) {
        const auto src = static_cast<Eigen::Index>(dim - 1 - c);
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        model.components.row(static_cast<Eigen::Index>(c)) = v.transpose();
        model.explained_variance(static_cast<Eigen::Index>(c)) = std::max(0.0, solver.eigenvalues()(src));
    }
    return model;
}

std::vector<double> pca_transform(const PcaModel& model, std::span<const double> vector) {
    require(vector.size() == model.dim(), ErrorKind::parameter, "vector length does not match PCA model");
    const Eigen::Map<const Eigen::VectorXd> x(vector.data(), static_cast<Eigen::Index>(vector.size()));
    const Eigen::VectorXd y = model.components * (x - model.mean);
    return {y.data(), y.data() + y.size()};
}

Matrix pca_transform(const PcaModel& model, const Matrix& data) {
    require(static_cast<std::size_t>(data.cols()) == model.dim(), ErrorKind::parameter,
            "data width does not match PCA model");
    return (data.rowwise() - model.mean.transpose()) * model.components.transpose();
}

std::vector<double> pca_inverse(const PcaModel& model, std::span<const double> coefficients) {
    require(coefficients.size() == model.n_components(), ErrorKind::parameter,
            "coefficient count does not match PCA model");
    const Eigen::Map<const Eigen::VectorXd> y(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
    const Eigen::VectorXd x = model.components.transpose() * y + model.mean;
    return {x.data(), x.data() + x.size()};
}

ProfileBlocks profile_blocks(std::span<const TimbreProfile> profiles, std::size_t time_points) {
    require(!profiles.empty(), ErrorKind::parameter, "no profiles");
    const std::size_t channels = profiles.front().spectral_envelope.size();
    const double frame_rate = profiles.front().frame_rate;
    const auto n = static_cast<Eigen::Index>(profiles.size());
    ProfileBlocks blocks;
    blocks.spectral.resize(n, static_cast<Eigen::Index>(channels));
    blocks.roughness.resize(n, static_cast<Eigen::Index>(time_points));
    blocks.temporal.resize(n, static_cast<Eigen::Index>(time_points));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = profiles[static_cast<std::size_t>(i)];
        require(p.spectral_envelope.size() == channels && p.frame_rate == frame_rate, ErrorKind::parameter,
                "profiles come from different filterbanks or frame rates");
        require(!p.temporal_envelope.empty() && p.temporal_envelope.size() == p.roughness_envelope.size(),
                ErrorKind::parameter, "inconsistent profile lengths");
        // Spectral shape in dB relative to total power, independent of level.
        const double total = std::accumulate(p.spectral_envelope.begin(), p.spectral_envelope.end(), 0.0);
        for (std::size_t c = 0; c < channels; ++c) {
            const double share = total > 0.0 ? p.spectral_envelope[c] / total : 0.0;
            blocks.spectral(i, static_cast<Eigen::Index>(c)) = 10.0 * std::log10(std::max(share, kSpectralFloor));
        }
        const double duration = p.duration > 0.0 ? p.duration : p.temporal_envelope.size() / p.frame_rate;
        const auto rough = resample_envelope(p.roughness_envelope, duration, time_points);
        const auto temporal = resample_envelope(p.temporal_envelope, duration, time_points);
        for (std::size_t t = 0; t < time_points; ++t) {
            blocks.roughness(i, static_cast<Eigen::Index>(t)) = rough[t];
            blocks.temporal(i, static_cast<Eigen::Index>(t)) = temporal[t];
        }
    }
    return blocks;
}

std::vector<FeatureVector> concat_features(std::span<const TimbreProfile> profiles, std::span<const std::string> ids,
                                           const FeatureConfig& config) {
    require(profiles.size() == ids.size(), ErrorKind::parameter, "one id per profile required");
    const ProfileBlocks blocks = profile_blocks(profiles, config.time_points);
    const std::size_t d = config.d_pca;

    std::vector<FeatureVector> out(profiles.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].source_id = ids[i];
        out[i].values.resize(3 * d);
    }
    const Matrix* parts[] = {&blocks.spectral, &blocks.roughness, &blocks.temporal};
    for (std::size_t b = 0; b < 3; ++b) {
        const PcaModel model = pca_fit(*parts[b], d);
        const Matrix projected = pca_transform(model, *parts[b]);
        const double total_variance = model.explained_variance.sum();
        if (!(total_variance > 0.0)) fail(ErrorKind::zero_variance, "profile block has no variance");
        const double scale = 1.0 / std::sqrt(total_variance);
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                out[i].values[b * d + c] = projected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) * scale;
            }
        }
    }
    return out;
}

KnnGraph exact_knn(const Matrix& distances, std::size_t k) {
    const auto n = static_cast<std::size_t>(distances.rows());
    require(k >= 1 && k < n, ErrorKind::parameter, "k must lie in [1, n - 1]");
    KnnGraph g;
    g.k = k;
    g.indices.resize(n * k);
    g.distances.resize(n * k);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::erase(order, i);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double da = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
                              const double db = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
                              return da < db || (da == db && a < b);
                          });
        order.push_back(i);  // restore size for the next row
        for (std::size_t j = 0; j < k; ++j) {
            g.indices[i * k + j] = order[j];
            g.distances[i * k + j] = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(order[j]));
        }
    }
    return g;
}

std::vector<NeighborScale> calibrate_scales(const KnnGraph& graph) {
    const std::size_t k = graph.k;
    const std::size_t n = graph.indices.size() / k;
    const double target = std::log2(static_cast<double>(k));

    double global_mean = 0.0;
    for (double d : graph.distances) global_mean += d;
    global_mean /= static_cast<double>(graph.distances.size());

    std::vector<NeighborScale> scales(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* d = &graph.distances[i * k];
        double rho = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (d[j] > 0.0) {
                rho = d[j];
                break;
            }
        }
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        double mid = 1.0;
        for (int iter = 0; iter < 64; ++iter) {
            double psum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double gap = d[j] - rho;
                psum += gap > 0.0 ? std::exp(-gap / mid) : 1.0;
            }
            if (std::abs(psum - target) < 1e-5) break;
            if (psum > target) {
                hi = mid;
                mid = (lo + hi) / 2.0;
            } else {
                lo = mid;
                mid = std::isinf(hi) ? mid * 2.0 : (lo + hi) / 2.0;
            }
        }
        double local_mean = 0.0;
        for (std::size_t j = 0; j < k; ++j) local_mean += d[j];
        local_mean /= static_cast<double>(k);
        const double floor = kMinSigmaScale * (rho > 0.0 ? local_mean : global_mean);
        scales[i] = {rho, std::max(mid, floor)};
    }
    return scales;
}

std::vector<WeightedEdge> fuzzy_graph(const KnnGraph& graph, std::span<const NeighborScale> scales) {
    const std::size_t k = graph.k;
    const std::size_t n = graph.indices.size() / k;
    struct Directed {
        std::size_t lo, hi;
        double w;
        bool forward;  // lo -> hi
    };
    std::vector<Directed> entries;
    entries.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t t = graph.indices[i * k + j];
            const double gap = graph.distances[i * k + j] - scales[i].rho;
            const double w = gap > 0.0 ? std::exp(-gap / scales[i].sigma) : 1.0;
            entries.push_back({std::min(i, t), std::max(i, t), w, i < t});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Directed& a, const Directed& b) {
        return a.lo != b.lo ? a.lo < b.lo : (a.hi != b.hi ? a.hi < b.hi : a.forward > b.forward);
    });

    std::vector<WeightedEdge> edges;
    for (std::size_t e = 0; e < entries.size();) {
        double fwd = 0.0;
        double bwd = 0.0;
        std::size_t f = e;
        for (; f < entries.size() && entries[f].lo == entries[e].lo && entries[f].hi == entries[e].hi; ++f) {
            (entries[f].forward ? fwd : bwd) = entries[f].w;
        }
        const double w = fwd + bwd - fwd * bwd;
        if (w > 0.0) {
            edges.push_back({entries[e].lo, entries[e].hi, w});
            edges.push_back({entries[e].hi, entries[e].lo, w});
        }
        e = f;
    }
    std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
        return a.head != b.head ? a.head < b.head : a.tail < b.tail;
    });
    return edges;
}

std::pair<double, double> fit_ab(double spread, double min_dist) {
    require(spread > 0.0 && min_dist >= 0.0 && min_dist < 3.0 * spread, ErrorKind::parameter,
            "need spread > 0 and 0 <= min_dist < 3 spread");
    constexpr int kPoints = 300;
    std::vector<double> xs(kPoints), ys(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        xs[i] = 3.0 * spread * i / (kPoints - 1);
        ys[i] = xs[i] < min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
    }
    auto sse = [&](double a, double b) {
        double s = 0.0;
        for (int i = 0; i < kPoints; ++i) {
            const double r = 1.0 / (1.0 + a * std::pow(xs[i], 2.0 * b)) - ys[i];
            s += r * r;
        }
        return s;
    };

    // Levenberg-Marquardt from (1, 1).
    double a = 1.0, b = 1.0, lambda = 1e-3;
    double cost = sse(a, b);
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (int i = 0; i < kPoints; ++i) {
            if (xs[i] <= 0.0) continue;  // residual there is identically 0
            const double u = std::pow(xs[i], 2.0 * b);
            const double denom = 1.0 + a * u;
            const double r = 1.0 / denom - ys[i];
            const Eigen::Vector2d grad(-u / (denom * denom), -a * u * 2.0 * std::log(xs[i]) / (denom * denom));
            jtj += grad * grad.transpose();
            jtr += grad * r;
        }
        Eigen::Matrix2d damped = jtj;
        damped.diagonal() *= (1.0 + lambda);
        const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
        const double na = a + step(0), nb = b + step(1);
        const double ncost = (na > 0.0 && nb > 0.0) ? sse(na, nb) : std::numeric_limits<double>::infinity();
        if (ncost < cost) {
            const bool done = cost - ncost < 1e-14 * (1.0 + cost);
            a = na;
            b = nb;
            cost = ncost;
            lambda = std::max(lambda / 10.0, 1e-12);
            if (done) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {a, b};
}

Embedding2D embed(std::span<const FeatureVector> vectors, const UmapParams& params, std::uint64_t seed,
                  Exec knn_exec) {
    const std::size_t n = vectors.size();
    require(params.n_neighbors >= 2, ErrorKind::parameter, "n_neighbors must be at least 2");
    require(n >= params.n_neighbors + 1, ErrorKind::parameter,
            "need more points than neighbors (" + std::to_string(n) + " <= " + std::to_string(params.n_neighbors) + ")");
    require(params.n_epochs >= 1, ErrorKind::parameter, "n_epochs must be positive");

    const Matrix data = to_matrix(vectors);
    const Matrix dist = kernels::pairwise_distances(data, knn_exec);
    const KnnGraph graph = exact_knn(dist, params.n_neighbors);
    const auto scales = calibrate_scales(graph);
    auto edges = fuzzy_graph(graph, scales);
    const auto [a, b] = fit_ab(params.spread, params.min_dist);

    // Initialization: top-2 principal axes, each rescaled to [-10, 10].
    const std::size_t init_dims = std::min<std::size_t>(2, std::min(n - 1, static_cast<std::size_t>(data.cols())));
    const PcaModel init_model = pca_fit(data, init_dims);
    const Matrix init = pca_transform(init_model, data);
    std::vector<std::array<double, 2>> y(n, {0.0, 0.0});
    for (Eigen::Index c = 0; c < init.cols(); ++c) {
        const double lo = init.col(c).minCoeff();
        const double hi = init.col(c).maxCoeff();
        const double span = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            y[i][static_cast<std::size_t>(c)] =
                span > 0.0 ? -10.0 + 20.0 * (init(static_cast<Eigen::Index>(i), c) - lo) / span : 0.0;
        }
    }

    // Edge sampling schedule: strong edges are visited every epoch, weaker
    // ones proportionally less often; edges too weak to be sampled are dropped.
    double w_max = 0.0;
    for (const auto& e : edges) w_max = std::max(w_max, e.weight);
    const auto epochs_d = static_cast<double>(params.n_epochs);
    std::erase_if(edges, [&](const WeightedEdge& e) { return e.weight < w_max / epochs_d; });
    const std::size_t m = edges.size();
    std::vector<double> epochs_per_sample(m), next_sample(m), epochs_per_negative(m), next_negative(m);
    const double neg_rate = static_cast<double>(params.negative_sample_rate);
    for (std::size_t e = 0; e < m; ++e) {
        epochs_per_sample[e] = w_max / edges[e].weight;
        next_sample[e] = epochs_per_sample[e];
        epochs_per_negative[e] = neg_rate > 0.0 ? epochs_per_sample[e] / neg_rate : 0.0;
        next_negative[e] = epochs_per_negative[e];
    }

    Rng rng(seed);
    for (std::size_t epoch = 0; epoch < params.n_epochs; ++epoch) {
        const double alpha = params.learning_rate * (1.0 - static_cast<double>(epoch) / epochs_d);
        const auto ep = static_cast<double>(epoch);
        for (std::size_t e = 0; e < m; ++e) {
            if (next_sample[e] > ep) continue;
            auto& cur = y[edges[e].head];
            auto& other = y[edges[e].tail];
            const double dx = cur[0] - other[0];
            const double dy = cur[1] - other[1];
            const double d2 = dx * dx + dy * dy;
            if (d2 > 0.0) {
                const double coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
                const double gx = clip(coeff * dx) * alpha;
                const double gy = clip(coeff * dy) * alpha;
                cur[0] += gx;
                cur[1] += gy;
                other[0] -= gx;
                other[1] -= gy;
            }
            next_sample[e] += epochs_per_sample[e];

            if (epochs_per_negative[e] <= 0.0) continue;
            const auto n_neg = static_cast<std::size_t>((ep - next_negative[e]) / epochs_per_negative[e]);
            for (std::size_t s = 0; s < n_neg; ++s) {
                const std::size_t k = rng.below(n);
                if (k == edges[e].head) continue;
                const auto& neg = y[k];
                const double nx = cur[0] - neg[0];
                const double ny = cur[1] - neg[1];
                const double nd2 = nx * nx + ny * ny;
                double gx = kGradientClip;
                double gy = kGradientClip;
                if (nd2 > 0.0) {
                    const double coeff = 2.0 * b / ((0.001 + nd2) * (a * std::pow(nd2, b) + 1.0));
                    gx = clip(coeff * nx);
                    gy = clip(coeff * ny);
                }
                cur[0] += gx * alpha;
                cur[1] += gy * alpha;
            }
            next_negative[e] += static_cast<double>(n_neg) * epochs_per_negative[e];
        }
    }

    Embedding2D out;
    out.ids.reserve(n);
    for (const auto& v : vectors) out.ids.push_back(v.source_id);
    out.coords = std::move(y);
    out.seed = seed;
    out.params = params;
    return out;
}

double trustworthiness(const Matrix& high, const Matrix& low, std::size_t k) {
    const auto n = static_cast<std::size_t>(high.rows());
    require(static_cast<std::size_t>(low.rows()) == n, ErrorKind::parameter, "embedding does not match inputs");
    require(k >= 1 && 2 * k < n, ErrorKind::parameter, "trustworthiness needs 1 <= k < n / 2");
    const Matrix dh = kernels::pairwise_distances(high);
    const Matrix dl = kernels::pairwise_distances(low);
    const KnnGraph low_nn = exact_knn(dl, k);

    std::vector<std::size_t> order(n), rank(n);
    double penalty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (a == i || b == i) return a == i && b != i;
            const double da = dh(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
            const double db = dh(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
            return da < db || (da == db && a < b);
        });
        for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;  // self gets 0, nearest 1
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t r = rank[low_nn.indices[i * k + j]];
            if (r > k) penalty += static_cast<double>(r - k);
        }
    }
    const double nd = static_cast<double>(n), kd = static_cast<double>(k);
    return 1.0 - 2.0 / (nd * kd * (2.0 * nd - 3.0 * kd - 1.0)) * penalty;
}

double trustworthiness(std::span<const FeatureVector> high, const Embedding2D& low, std::size_t k) {
    require(high.size() == low.ids.size(), ErrorKind::parameter, "embedding does not match inputs");
    for (std::size_t i = 0; i < high.size(); ++i) {
        require(high[i].source_id == low.ids[i], ErrorKind::parameter, "embedding ids are not aligned with inputs");
    }
    Matrix l(static_cast<Eigen::Index>(low.coords.size()), 2);
    for (std::size_t i = 0; i < low.coords.size(); ++i) {
        l(static_cast<Eigen::Index>(i), 0) = low.coords[i][0];
        l(static_cast<Eigen::Index>(i), 1) = low.coords[i][1];
    }
    return trustworthiness(to_matrix(high), l, k);
}

}  // namespace timbremap
