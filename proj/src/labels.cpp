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

#include "timbremap/labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

namespace {

constexpr double kWeightEpsilon = 1e-9;

double wrap_degrees(double deg) {
    double h = std::fmod(deg, 360.0);
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    return h;
}

}  // namespace

ShapeLabel shape_label(std::span<const double> envelope201) {
    require(envelope201.size() == kShapeRadii, ErrorKind::parameter,
            "shape envelope needs " + std::to_string(kShapeRadii) + " values, got " +
                std::to_string(envelope201.size()));
    ShapeLabel label;
    label.radii.resize(kShapeRadii);
    for (std::size_t i = 0; i < kShapeRadii; ++i) {
        const double v = envelope201[i];
        require(std::isfinite(v) && v >= 0.0 && v <= 1.0 + 1e-9, ErrorKind::parameter,
                "envelope values must lie in [0, 1]");
        label.radii[i] = std::clamp(v, kShapeMinRadius, 1.0);
    }
    label.polygon.reserve(2 * kShapeRadii);
    for (std::size_t i = 0; i < kShapeRadii; ++i) {
        const double theta = static_cast<double>(i) * std::numbers::pi / static_cast<double>(kShapeSteps);
        label.polygon.push_back({label.radii[i] * std::sin(theta), label.radii[i] * std::cos(theta)});
    }
    for (std::size_t j = 0; j < kShapeRadii; ++j) {
        const Point& p = label.polygon[kShapeSteps - j];
        label.polygon.push_back({-p.x, p.y});
    }
    return label;
}

ShapeLabel shape_label_from_profile(const TimbreProfile& profile) {
    require(!profile.temporal_envelope.empty(), ErrorKind::parameter, "profile has no temporal envelope");
    const double duration =
        profile.duration > 0.0 ? profile.duration : profile.temporal_envelope.size() / profile.frame_rate;
    auto env = resample_envelope(profile.temporal_envelope, duration, kShapeRadii);
    for (double& v : env) v = std::clamp(v, 0.0, 1.0);
    return shape_label(env);
}

double polygon_area(std::span<const Point> polygon) {
    double twice = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point& a = polygon[i];
        const Point& b = polygon[(i + 1) % polygon.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return std::abs(twice) / 2.0;
}

std::string_view to_string(ColorScheme scheme) {
    return scheme == ColorScheme::wheel_v1 ? "wheel-v1" : "descriptor-v2";
}

ColorScheme color_scheme_from_string(std::string_view text) {
    if (text == "wheel-v1" || text == "color-v1") return ColorScheme::wheel_v1;
    if (text == "descriptor-v2" || text == "color-v2") return ColorScheme::descriptor_v2;
    fail(ErrorKind::parameter, "unknown color scheme '" + std::string(text) + "'");
}

ColorLabel color_wheel(Point position, Point center, double max_radius) {
    require(max_radius > 0.0, ErrorKind::parameter, "color wheel radius must be positive");
    const double dx = position.x - center.x;
    const double dy = position.y - center.y;
    const double dist = std::hypot(dx, dy);
    ColorLabel c;
    c.scheme = ColorScheme::wheel_v1;
    c.lightness = 0.5;
    if (dist == 0.0) {
        c.hue = 0.0;
        c.saturation = 0.0;
        return c;
    }
    c.hue = wrap_degrees(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
    c.saturation = std::min(dist / max_radius, 1.0);
    return c;
}

std::vector<ColorLabel> color_wheel_labels(std::span<const Point> positions) {
    require(!positions.empty(), ErrorKind::parameter, "no positions");
    Point center;
    for (const auto& p : positions) {
        center.x += p.x;
        center.y += p.y;
    }
    center.x /= static_cast<double>(positions.size());
    center.y /= static_cast<double>(positions.size());
    double radius = 0.0;
    for (const auto& p : positions) radius = std::max(radius, distance(p, center));
    std::vector<ColorLabel> out;
    out.reserve(positions.size());
    for (const auto& p : positions) {
        out.push_back(radius > 0.0 ? color_wheel(p, center, radius) : ColorLabel{0.0, 0.0, 0.5, ColorScheme::wheel_v1});
    }
    return out;
}

CentroidCalibration calibrate_centroids(std::span<const TimbreDescriptors> descriptors) {
    require(!descriptors.empty(), ErrorKind::parameter, "no descriptors to calibrate");
    CentroidCalibration calib{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& d : descriptors) {
        calib.min_centroid = std::min(calib.min_centroid, d.spectral_centroid);
        calib.max_centroid = std::max(calib.max_centroid, d.spectral_centroid);
    }
    return calib;
}

ColorLabel color_descriptor(const TimbreDescriptors& desc, const CentroidCalibration& calib, HuePath path) {
    require(calib.min_centroid < calib.max_centroid, ErrorKind::parameter, "degenerate centroid calibration");
    const double t = std::clamp((desc.spectral_centroid - calib.min_centroid) /
                                    (calib.max_centroid - calib.min_centroid),
                                0.0, 1.0);
    ColorLabel c;
    c.scheme = ColorScheme::descriptor_v2;
    c.hue = path == HuePath::via_green ? 240.0 - 240.0 * t : wrap_degrees(240.0 + 120.0 * t);
    c.saturation = std::clamp(1.0 - desc.spectral_flatness, 0.0, 1.0);
    c.lightness = 0.5;
    return c;
}

double medoid_cost(const Matrix& distances, std::span<const std::size_t> medoids) {
    double cost = 0.0;
    for (Eigen::Index i = 0; i < distances.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m : medoids) best = std::min(best, distances(i, static_cast<Eigen::Index>(m)));
        cost += best;
    }
    return cost;
}

KMedoidsResult kmedoids(const Matrix& distances, std::span<const std::string> ids, std::size_t k, std::uint64_t seed,
                        std::size_t max_iters) {
    const auto n = static_cast<std::size_t>(distances.rows());
    require(ids.size() == n, ErrorKind::parameter, "one id per point required");
    require(k >= 1 && k < n, ErrorKind::parameter, "k-medoids needs 1 <= k < n");
    auto d = [&](std::size_t a, std::size_t b) {
        return distances(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    };

    // Seeding: first medoid uniform, then proportional to squared distance to
    // the nearest chosen medoid.
    Rng rng(seed);
    std::vector<std::size_t> medoids{static_cast<std::size_t>(rng.below(n))};
    std::vector<char> is_medoid(n, 0);
    is_medoid[medoids[0]] = 1;
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = d(i, medoids[0]);
    while (medoids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += is_medoid[i] ? 0.0 : nearest[i] * nearest[i];
        std::size_t pick = n;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (is_medoid[i]) continue;
                target -= nearest[i] * nearest[i];
                pick = i;
                if (target < 0.0) break;
            }
        }
        if (pick == n || is_medoid[pick]) {
            // All remaining points coincide with medoids; take any free one.
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_medoid[i]) free.push_back(i);
            }
            pick = free[rng.below(free.size())];
        }
        medoids.push_back(pick);
        is_medoid[pick] = 1;
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], d(i, pick));
    }

    KMedoidsResult result;
    result.initial_cost = medoid_cost(distances, medoids);
    double cost = result.initial_cost;

    std::vector<std::size_t> slot1(n);
    std::vector<double> d1(n), d2(n);
    auto refresh = [&] {
        for (std::size_t o = 0; o < n; ++o) {
            d1[o] = d2[o] = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < k; ++s) {
                const double v = d(o, medoids[s]);
                if (v < d1[o]) {
                    d2[o] = d1[o];
                    d1[o] = v;
                    slot1[o] = s;
                } else if (v < d2[o]) {
                    d2[o] = v;
                }
            }
        }
    };

    refresh();
    while (result.iterations < max_iters) {
        double best_delta = 0.0;
        std::size_t best_slot = k, best_point = n;
        for (std::size_t s = 0; s < k; ++s) {
            for (std::size_t h = 0; h < n; ++h) {
                if (is_medoid[h]) continue;
                double delta = 0.0;
                for (std::size_t o = 0; o < n; ++o) {
                    const double doh = d(o, h);
                    if (slot1[o] == s) {
                        delta += std::min(doh, d2[o]) - d1[o];
                    } else if (doh < d1[o]) {
                        delta += doh - d1[o];
                    }
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_slot = s;
                    best_point = h;
                }
            }
        }
        if (best_slot == k || best_delta > -1e-12 * (1.0 + cost)) break;
        is_medoid[medoids[best_slot]] = 0;
        medoids[best_slot] = best_point;
        is_medoid[best_point] = 1;
        refresh();
        cost = medoid_cost(distances, medoids);
        ++result.iterations;
    }

    std::sort(medoids.begin(), medoids.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    result.medoids = medoids;
    for (std::size_t m : medoids) result.medoid_ids.push_back(ids[m]);
    result.assignment.resize(n);
    for (std::size_t o = 0; o < n; ++o) {
        std::size_t best = 0;
        for (std::size_t s = 1; s < k; ++s) {
            if (d(o, medoids[s]) < d(o, medoids[best])) best = s;
        }
        result.assignment[o] = best;
    }
    result.cost = medoid_cost(distances, medoids);
    return result;
}

KMedoidsResult kmedoids(std::span<const FeatureVector> vectors, std::size_t k, std::uint64_t seed,
                        std::size_t max_iters) {
    std::vector<std::string> ids;
    ids.reserve(vectors.size());
    for (const auto& v : vectors) ids.push_back(v.source_id);
    return kmedoids(kernels::pairwise_distances(to_matrix(vectors)), ids, k, seed, max_iters);
}

std::vector<double> texture_weights(std::span<const double> vector, std::span<const FeatureVector> medoid_vectors) {
    require(!medoid_vectors.empty(), ErrorKind::parameter, "no medoids");
    std::vector<double> w(medoid_vectors.size());
    double total = 0.0;
    for (std::size_t m = 0; m < medoid_vectors.size(); ++m) {
        const auto& mv = medoid_vectors[m].values;
        require(mv.size() == vector.size(), ErrorKind::parameter, "medoid vector length mismatch");
        double acc = 0.0;
        for (std::size_t k = 0; k < mv.size(); ++k) {
            const double diff = vector[k] - mv[k];
            acc += diff * diff;
        }
        const double dist = std::sqrt(acc) + kWeightEpsilon;
        w[m] = 1.0 / (dist * dist);
        total += w[m];
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace timbremap
