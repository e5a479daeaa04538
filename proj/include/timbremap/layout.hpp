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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timbremap/embedding.hpp"

namespace timbremap {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

struct Canvas {
    double width = 800.0;
    double height = 800.0;
    double margin = 40.0;
    double diameter = 64.0;

    /// Throws unless the usable area fits at least one label.
    void validate() const;

    double min_x() const { return margin + diameter / 2.0; }
    double max_x() const { return width - margin - diameter / 2.0; }
    double min_y() const { return margin + diameter / 2.0; }
    double max_y() const { return height - margin - diameter / 2.0; }
    Point center() const { return {width / 2.0, height / 2.0}; }
    bool contains(Point p) const { return p.x >= min_x() && p.x <= max_x() && p.y >= min_y() && p.y <= max_y(); }

    /// Labels that fit on a square grid of pitch `diameter`; densities are
    /// quoted against this.
    std::size_t capacity() const;

    bool operator==(const Canvas&) const = default;
};

enum class PlacementMode { dr, random };

std::string_view to_string(PlacementMode mode);
PlacementMode placement_mode_from_string(std::string_view text);

struct PlacedSet {
    std::vector<std::string> ids;
    std::vector<Point> positions;
    Canvas canvas;
    PlacementMode mode = PlacementMode::dr;
    std::uint64_t seed = 0;

    std::optional<Point> position_of(std::string_view id) const;
};

/// Uniform-scale fit of the embedding's bounding box into the usable rectangle.
PlacedSet scale_to_canvas(const Embedding2D& embedding, const Canvas& canvas);

struct OverlapParams {
    std::size_t max_iters = 1000;
    double stiffness = 0.5;
    /// Springs rest at diameter + padding so relaxation terminates in finitely
    /// many steps instead of approaching contact geometrically.
    double padding = 0.5;
};

struct OverlapReport {
    std::size_t iterations = 0;
    double max_displacement = 0.0;  // largest total movement of any label
    bool converged = true;
};

/// Pair overlap count (center distance < diameter).
std::size_t count_overlaps(std::span<const Point> positions, double diameter);

/// Spring relaxation. Throws Error(unresolved_overlap) when overlaps remain
/// after `max_iters` steps.
PlacedSet resolve_overlaps(const PlacedSet& placed, const OverlapParams& params = {}, OverlapReport* report = nullptr);

/// Uniform random centers, then overlap resolution.
PlacedSet random_placement(std::span<const std::string> ids, const Canvas& canvas, std::uint64_t seed,
                           const OverlapParams& params = {}, OverlapReport* report = nullptr);

}  // namespace timbremap
