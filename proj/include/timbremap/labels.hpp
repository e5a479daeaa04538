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

// Visual label generators: envelope shapes, the two color schemes, and the
// k-medoid machinery behind texture labels. Texture images live in texture.hpp.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timbremap/cochlea.hpp"
#include "timbremap/embedding.hpp"
#include "timbremap/layout.hpp"

namespace timbremap {

// --- shapes ---------------------------------------------------------------

inline constexpr std::size_t kShapeSteps = 200;             // angular steps per half
inline constexpr std::size_t kShapeRadii = kShapeSteps + 1;  // i = 0..200
inline constexpr double kShapeMinRadius = 0.15;

/// Symmetric glyph whose contour radius follows the temporal envelope.
///
/// Unit coordinates, y up, centered at the origin. `polygon` holds 402
/// vertices: the right half from the top (i = 0) clockwise to the bottom
/// (i = 200), then its mirror image from the bottom back up to the top. The
/// last vertex coincides with the first, closing the outline; winding is
/// clockwise.
struct ShapeLabel {
    std::vector<double> radii;    // 201 values in [kShapeMinRadius, 1]
    std::vector<Point> polygon;   // 402 vertices

    bool operator==(const ShapeLabel&) const = default;
};

ShapeLabel shape_label(std::span<const double> envelope201);

/// Convenience: resample a temporal envelope to 201 points and build the glyph.
ShapeLabel shape_label_from_profile(const TimbreProfile& profile);

double polygon_area(std::span<const Point> polygon);

// --- colors ---------------------------------------------------------------

enum class ColorScheme { wheel_v1, descriptor_v2 };

std::string_view to_string(ColorScheme scheme);
ColorScheme color_scheme_from_string(std::string_view text);

struct ColorLabel {
    double hue = 0.0;         // degrees, [0, 360)
    double saturation = 0.0;  // [0, 1]
    double lightness = 0.5;
    ColorScheme scheme = ColorScheme::wheel_v1;

    bool operator==(const ColorLabel&) const = default;
};

/// Hue from the angle about `center` (0 deg on +x), saturation from the
/// distance relative to `max_radius`.
ColorLabel color_wheel(Point position, Point center, double max_radius);

/// Wheel colors for a whole placed set: center = centroid, radius = largest
/// centroid distance.
std::vector<ColorLabel> color_wheel_labels(std::span<const Point> positions);

struct CentroidCalibration {
    double min_centroid = 0.0;
    double max_centroid = 1.0;
};

CentroidCalibration calibrate_centroids(std::span<const TimbreDescriptors> descriptors);

/// Which way the blue-to-red gradient walks round the hue circle.
enum class HuePath { via_green, via_magenta };

/// Brightness on a hue gradient from blue (240 deg) to red, tonality on
/// saturation (1 - flatness).
ColorLabel color_descriptor(const TimbreDescriptors& desc, const CentroidCalibration& calib,
                            HuePath path = HuePath::via_green);

// --- k-medoids --------------------------------------------------------------

struct KMedoidsResult {
    std::vector<std::size_t> medoids;     // indices into the input, sorted by id
    std::vector<std::string> medoid_ids;  // sorted
    std::vector<std::size_t> assignment;  // nearest medoid slot per point
    double cost = 0.0;
    double initial_cost = 0.0;
    std::size_t iterations = 0;
};

/// Total distance from every point to its nearest medoid.
double medoid_cost(const Matrix& distances, std::span<const std::size_t> medoids);

/// PAM: seeded k-means++-style seeding, then best-improvement swaps until no
/// swap lowers the cost or `max_iters` swaps were made.
KMedoidsResult kmedoids(std::span<const FeatureVector> vectors, std::size_t k, std::uint64_t seed,
                        std::size_t max_iters = 100);
KMedoidsResult kmedoids(const Matrix& distances, std::span<const std::string> ids, std::size_t k,
                        std::uint64_t seed, std::size_t max_iters = 100);

inline constexpr std::size_t kTextureMedoids = 8;

/// Inverse squared distance weights over the medoids, normalized to sum 1.
std::vector<double> texture_weights(std::span<const double> vector, std::span<const FeatureVector> medoid_vectors);

}  // namespace timbremap
