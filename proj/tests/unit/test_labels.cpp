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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "testdata.hpp"
#include "timbremap/error.hpp"
#include "timbremap/labels.hpp"

using namespace timbremap;

namespace {

std::vector<double> random_envelope(Rng& rng) {
    std::vector<double> env(kShapeRadii);
    for (double& v : env) v = rng.uniform();
    env[rng.below(kShapeRadii)] = 1.0;
    return env;
}

double hue_diff(double a, double b) {
    double d = std::fmod(a - b + 540.0, 360.0) - 180.0;
    return d;
}

std::vector<std::vector<double>> values_of(const std::vector<FeatureVector>& vs) {
    std::vector<std::vector<double>> out;
    for (const auto& v : vs) out.push_back(v.values);
    return out;
}

}  // namespace

TEST_CASE("shape radii are recoverable from the polygon") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto env = random_envelope(rng);
        const ShapeLabel s = shape_label(env);
        REQUIRE(s.radii.size() == 201);
        REQUIRE(s.polygon.size() == 402);
        for (std::size_t i = 0; i < kShapeRadii; ++i) {
            const double expected = std::max(env[i], kShapeMinRadius);
            CHECK(std::abs(std::hypot(s.polygon[i].x, s.polygon[i].y) - expected) < 1e-9);
            // Angle measured clockwise from the upward vertical.
            if (env[i] > kShapeMinRadius) {
                const double theta = std::atan2(s.polygon[i].x, s.polygon[i].y);
                CHECK(std::abs(theta - std::numbers::pi * i / 200.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("shapes are exactly mirror symmetric and closed") {
    Rng rng(3);
    const ShapeLabel s = shape_label(random_envelope(rng));
    for (std::size_t k = 0; k < kShapeRadii; ++k) {
        const Point right = s.polygon[kShapeSteps - k];
        const Point left = s.polygon[kShapeRadii + k];
        CHECK(left.x == -right.x);
        CHECK(left.y == right.y);
    }
    CHECK(s.polygon.back().y == s.polygon.front().y);
    CHECK(std::abs(s.polygon.back().x) == std::abs(s.polygon.front().x));
    // Clockwise winding: negative signed area under the y-up convention.
    double signed2 = 0.0;
    for (std::size_t i = 0; i + 1 < s.polygon.size(); ++i) {
        signed2 += s.polygon[i].x * s.polygon[i + 1].y - s.polygon[i + 1].x * s.polygon[i].y;
    }
    CHECK(signed2 < 0.0);
}

TEST_CASE("constant envelope is a circle; decaying envelope a teardrop") {
    const ShapeLabel circle = shape_label(std::vector<double>(kShapeRadii, 1.0));
    for (const Point& p : circle.polygon) CHECK(std::hypot(p.x, p.y) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> decay(kShapeRadii);
    for (std::size_t i = 0; i < kShapeRadii; ++i) decay[i] = 1.0 - static_cast<double>(i) / kShapeSteps;
    const ShapeLabel drop = shape_label(decay);
    CHECK(drop.radii.front() == 1.0);
    CHECK(drop.radii.back() == kShapeMinRadius);
    CHECK(drop.polygon.front().y == doctest::Approx(1.0));
    CHECK(drop.polygon[kShapeSteps].y == doctest::Approx(-kShapeMinRadius));
}

TEST_CASE("polygon area equals the sector sum") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const ShapeLabel s = shape_label(random_envelope(rng));
        CHECK(polygon_area(s.polygon) == doctest::Approx(oracle::fan_area(s.radii)).epsilon(1e-12));
    }
}

TEST_CASE("shape input validation") {
    CHECK_THROWS_AS(shape_label(std::vector<double>(200, 1.0)), Error);
}

TEST_CASE("color wheel conventions") {
    const Point c{400.0, 400.0};
    const ColorLabel at_center = color_wheel(c, c, 100.0);
    CHECK(at_center.saturation == 0.0);
    CHECK(at_center.hue == 0.0);
    const ColorLabel east = color_wheel({500.0, 400.0}, c, 100.0);
    CHECK(east.hue == doctest::Approx(0.0));
    CHECK(east.saturation == doctest::Approx(1.0));
    CHECK(east.lightness == 0.5);

    const ColorLabel p = color_wheel({430.0, 420.0}, c, 100.0);
    const ColorLabel q = color_wheel({400.0 - 20.0, 400.0 + 30.0}, c, 100.0);  // rotated by +90 deg
    CHECK(hue_diff(q.hue, p.hue) == doctest::Approx(90.0));
    CHECK(q.saturation == doctest::Approx(p.saturation));
}

TEST_CASE("wheel hues rotate with the placement") {
    Rng rng(2);
    std::vector<Point> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({rng.uniform(100, 700), rng.uniform(100, 700)});
    const auto base = color_wheel_labels(pts);
    Point center;
    for (const auto& p : pts) center = {center.x + p.x / 30.0, center.y + p.y / 30.0};
    for (double phi : {30.0, 135.0, 270.0}) {
        const double r = phi * std::numbers::pi / 180.0;
        std::vector<Point> rot;
        for (const auto& p : pts) {
            const double dx = p.x - center.x, dy = p.y - center.y;
            rot.push_back({center.x + dx * std::cos(r) - dy * std::sin(r), center.y + dx * std::sin(r) + dy * std::cos(r)});
        }
        const auto turned = color_wheel_labels(rot);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(std::abs(hue_diff(turned[i].hue, base[i].hue) - hue_diff(phi, 0.0)) < 1e-6);
            CHECK(turned[i].saturation == doctest::Approx(base[i].saturation).epsilon(1e-9));
        }
    }
}

TEST_CASE("descriptor colors") {
    const CentroidCalibration calib{500.0, 1500.0};
    const ColorLabel blue = color_descriptor({500.0, 0.0}, calib);
    CHECK(blue.hue == 240.0);
    CHECK(blue.saturation == 1.0);
    CHECK(blue.scheme == ColorScheme::descriptor_v2);
    const ColorLabel red = color_descriptor({1500.0, 1.0}, calib);
    CHECK(red.hue == 0.0);
    CHECK(red.saturation == 0.0);
    CHECK(color_descriptor({1000.0, 0.5}, calib).hue == doctest::Approx(120.0));
    CHECK(color_descriptor({1000.0, 0.5}, calib, HuePath::via_magenta).hue == doctest::Approx(300.0));

    double prev_hue = INFINITY, prev_sat = INFINITY;
    for (int s = 0; s <= 50; ++s) {
        const ColorLabel c = color_descriptor({500.0 + 20.0 * s, 0.02 * s}, calib);
        CHECK(c.hue < prev_hue);
        CHECK(c.saturation < prev_sat);
        prev_hue = c.hue;
        prev_sat = c.saturation;
    }
    CHECK_THROWS_AS(color_descriptor({0.0, 0.0}, {700.0, 700.0}), Error);

    const std::vector<TimbreDescriptors> ds = {{300.0, 0.1}, {900.0, 0.2}, {600.0, 0.3}};
    const CentroidCalibration fit = calibrate_centroids(ds);
    CHECK(fit.min_centroid == 300.0);
    CHECK(fit.max_centroid == 900.0);
}

TEST_CASE("k-medoids with k = 1 matches brute force") {
    const auto data = testdata::gaussian_clusters(3, 7, 4, 5.0, 0.4, 21);
    const auto pts = values_of(data.vectors);
    std::size_t best = 0;
    for (std::size_t c = 1; c < pts.size(); ++c) {
        if (oracle::medoid_cost(pts, {c}) < oracle::medoid_cost(pts, {best})) best = c;
    }
    const KMedoidsResult r = kmedoids(data.vectors, 1, 5);
    REQUIRE(r.medoids.size() == 1);
    CHECK(r.medoids[0] == best);
    CHECK(r.cost == doctest::Approx(oracle::medoid_cost(pts, {best})));
}

TEST_CASE("k-medoids finds one medoid per planted cluster") {
    const auto data = testdata::gaussian_clusters(8, 10, 8, 10.0, 0.05, 6);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const KMedoidsResult r = kmedoids(data.vectors, 8, seed);
        std::vector<std::size_t> clusters;
        for (std::size_t m : r.medoids) clusters.push_back(data.cluster[m]);
        std::sort(clusters.begin(), clusters.end());
        CHECK(std::adjacent_find(clusters.begin(), clusters.end()) == clusters.end());
        CHECK(r.cost <= r.initial_cost);
        CHECK(std::is_sorted(r.medoid_ids.begin(), r.medoid_ids.end()));
    }
}

TEST_CASE("k-medoids beats random medoid sets") {
    Rng rng(40);
    std::vector<FeatureVector> vs;
    for (int i = 0; i < 60; ++i) {
        FeatureVector v;
        v.source_id = "v" + std::to_string(100 + i);
        for (int d = 0; d < 5; ++d) v.values.push_back(rng.normal());
        vs.push_back(v);
    }
    const auto pts = values_of(vs);
    const KMedoidsResult r = kmedoids(vs, 8, 1);
    CHECK(r.cost == doctest::Approx(oracle::medoid_cost(pts, r.medoids)));
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> idx(60);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < 8; ++i) std::swap(idx[i], idx[i + rng.below(60 - i)]);
        idx.resize(8);
        CHECK(r.cost <= oracle::medoid_cost(pts, idx) + 1e-9);
    }
    CHECK(kmedoids(vs, 8, 1).medoids == r.medoids);
    CHECK_THROWS_AS(kmedoids(std::span(vs).first(8), 8, 1), Error);
}

TEST_CASE("texture weights") {
    std::vector<FeatureVector> medoids;
    for (int m = 0; m < 8; ++m) {
        FeatureVector v;
        v.values.assign(4, 0.0);
        v.values[m % 4] = m < 4 ? 1.0 : -1.0;
        medoids.push_back(v);
    }
    const auto at3 = texture_weights(medoids[3].values, medoids);
    CHECK(at3[3] > 1.0 - 1e-9);
    for (int m = 0; m < 8; ++m) {
        if (m != 3) CHECK(at3[m] < 1e-9);
    }
    const auto center = texture_weights(std::vector<double>(4, 0.0), medoids);
    for (double w : center) CHECK(w == doctest::Approx(0.125));

    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(4);
        for (double& v : x) v = rng.normal();
        const auto w = texture_weights(x, medoids);
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        std::vector<std::size_t> perm(8);
        std::iota(perm.begin(), perm.end(), 0);
        std::rotate(perm.begin(), perm.begin() + 3, perm.end());
        std::vector<FeatureVector> shuffled;
        for (std::size_t p : perm) shuffled.push_back(medoids[p]);
        const auto ws = texture_weights(x, shuffled);
        for (std::size_t i = 0; i < 8; ++i) CHECK(ws[i] == doctest::Approx(w[perm[i]]).epsilon(1e-12));
    }
}

TEST_CASE("nearby feature vectors get similar texture weights") {
    const auto data = testdata::gaussian_clusters(8, 12, 8, 4.0, 0.25, 9);
    const KMedoidsResult r = kmedoids(data.vectors, 8, 2);
    std::vector<FeatureVector> med;
    for (std::size_t m : r.medoids) med.push_back(data.vectors[m]);
    const Eigen::MatrixXd x = testdata::as_matrix(data.vectors);
    std::vector<double> dists;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) dists.push_back((x.row(i) - x.row(j)).norm());
    }
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    const double near = 0.1 * dists[dists.size() / 2];
    std::size_t pairs = 0;
    Rng rng(1);
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        // A random neighbor inside the radius.
        std::vector<double> y = data.vectors[i].values;
        std::vector<double> dir(y.size());
        double norm = 0.0;
        for (double& d : dir) {
            d = rng.normal();
            norm += d * d;
        }
        for (std::size_t d = 0; d < y.size(); ++d) y[d] += dir[d] / std::sqrt(norm) * near * rng.uniform();
        const auto a = texture_weights(data.vectors[i].values, med);
        const auto b = texture_weights(y, med);
        double l1 = 0.0;
        for (std::size_t m = 0; m < 8; ++m) l1 += std::abs(a[m] - b[m]);
        CHECK(l1 < 0.2);
        ++pairs;
    }
    CHECK(pairs == data.vectors.size());
}
