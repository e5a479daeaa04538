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

#include "timbremap/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

namespace {

Point clamp_to(const Canvas& c, Point p) {
    return {std::clamp(p.x, c.min_x(), c.max_x()), std::clamp(p.y, c.min_y(), c.max_y())};
}

// Stable separation direction for coincident labels, from the ordered id pair.
Point coincident_direction(const std::string& a, const std::string& b) {
    const std::string& lo = a < b ? a : b;
    const std::string& hi = a < b ? b : a;
    const std::uint64_t h = splitmix64(fnv1a(hi, fnv1a(lo) ^ 0x5bd1e995ull));
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(h >> 11) * 0x1.0p-53;
    Point u{std::cos(angle), std::sin(angle)};
    if (&lo != &a) {
        u = {-u.x, -u.y};  // direction is defined for lo; a is hi here
    }
    return u;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void Canvas::validate() const {
    require(diameter > 0.0, ErrorKind::parameter, "label diameter must be positive");
    require(margin >= 0.0, ErrorKind::parameter, "margin must be nonnegative");
    require(width - 2.0 * margin >= diameter && height - 2.0 * margin >= diameter, ErrorKind::parameter,
            "canvas usable area smaller than one label");
}

std::size_t Canvas::capacity() const {
    const auto cols = static_cast<std::size_t>(std::floor((width - 2.0 * margin) / diameter));
    const auto rows = static_cast<std::size_t>(std::floor((height - 2.0 * margin) / diameter));
    return cols * rows;
}

std::string_view to_string(PlacementMode mode) { return mode == PlacementMode::dr ? "dr" : "random"; }

PlacementMode placement_mode_from_string(std::string_view text) {
    if (text == "dr") return PlacementMode::dr;
    if (text == "random") return PlacementMode::random;
    fail(ErrorKind::parameter, "unknown placement mode '" + std::string(text) + "'");
}

std::optional<Point> PlacedSet::position_of(std::string_view id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == id) return positions[i];
    }
    return std::nullopt;
}

PlacedSet scale_to_canvas(const Embedding2D& embedding, const Canvas& canvas) {
    canvas.validate();
    require(!embedding.coords.empty(), ErrorKind::parameter, "embedding is empty");
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    for (const auto& c : embedding.coords) {
        x0 = std::min(x0, c[0]);
        x1 = std::max(x1, c[0]);
        y0 = std::min(y0, c[1]);
        y1 = std::max(y1, c[1]);
    }
    const double usable_w = canvas.max_x() - canvas.min_x();
    const double usable_h = canvas.max_y() - canvas.min_y();
    const double bw = x1 - x0;
    const double bh = y1 - y0;
    double scale = std::numeric_limits<double>::infinity();
    if (bw > 0.0) scale = std::min(scale, usable_w / bw);
    if (bh > 0.0) scale = std::min(scale, usable_h / bh);
    if (std::isinf(scale)) scale = 0.0;

    const Point mid = canvas.center();
    const double cx = (x0 + x1) / 2.0;
    const double cy = (y0 + y1) / 2.0;
    PlacedSet out;
    out.ids = embedding.ids;
    out.canvas = canvas;
    out.mode = PlacementMode::dr;
    out.seed = embedding.seed;
    out.positions.reserve(embedding.coords.size());
    for (const auto& c : embedding.coords) {
        out.positions.push_back(clamp_to(canvas, {mid.x + (c[0] - cx) * scale, mid.y + (c[1] - cy) * scale}));
    }
    return out;
}

std::size_t count_overlaps(std::span<const Point> positions, double diameter) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (distance(positions[i], positions[j]) < diameter) ++count;
        }
    }
    return count;
}

PlacedSet resolve_overlaps(const PlacedSet& placed, const OverlapParams& params, OverlapReport* report) {
    placed.canvas.validate();
    require(placed.ids.size() == placed.positions.size(), ErrorKind::parameter, "ids and positions differ in length");
    require(params.stiffness > 0.0 && params.stiffness <= 1.0, ErrorKind::parameter, "stiffness must lie in (0, 1]");

    const Canvas& canvas = placed.canvas;
    const std::size_t n = placed.positions.size();
    const double rest = canvas.diameter + params.padding;
    PlacedSet out = placed;
    for (auto& p : out.positions) p = clamp_to(canvas, p);

    OverlapReport local;
    std::vector<Point> shift(n);
    while (count_overlaps(out.positions, canvas.diameter) > 0) {
        if (local.iterations == params.max_iters) {
            fail(ErrorKind::unresolved_overlap,
                 std::to_string(count_overlaps(out.positions, canvas.diameter)) + " overlapping pairs remain after " +
                     std::to_string(params.max_iters) + " iterations");
        }
        std::fill(shift.begin(), shift.end(), Point{});
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Point& a = out.positions[i];
                const Point& b = out.positions[j];
                const double d = distance(a, b);
                if (d >= rest) continue;
                Point u = d > 1e-12 ? Point{(a.x - b.x) / d, (a.y - b.y) / d}
                                    : coincident_direction(out.ids[i], out.ids[j]);
                const double step = params.stiffness * (rest - d) / 2.0;
                shift[i].x += u.x * step;
                shift[i].y += u.y * step;
                shift[j].x -= u.x * step;
                shift[j].y -= u.y * step;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.positions[i] = clamp_to(canvas, {out.positions[i].x + shift[i].x, out.positions[i].y + shift[i].y});
        }
        ++local.iterations;
    }
    for (std::size_t i = 0; i < n; ++i) {
        local.max_displacement = std::max(local.max_displacement, distance(out.positions[i], clamp_to(canvas, placed.positions[i])));
    }
    if (report) *report = local;
    return out;
}

PlacedSet random_placement(std::span<const std::string> ids, const Canvas& canvas, std::uint64_t seed,
                           const OverlapParams& params, OverlapReport* report) {
    canvas.validate();
    require(!ids.empty(), ErrorKind::parameter, "no ids to place");
    if (ids.size() > canvas.capacity()) {
        fail(ErrorKind::capacity, std::to_string(ids.size()) + " labels exceed canvas capacity of " +
                                      std::to_string(canvas.capacity()));
    }
    Rng rng(seed);
    PlacedSet placed;
    placed.ids.assign(ids.begin(), ids.end());
    placed.canvas = canvas;
    placed.mode = PlacementMode::random;
    placed.seed = seed;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double x = rng.uniform(canvas.min_x(), canvas.max_x());
        const double y = rng.uniform(canvas.min_y(), canvas.max_y());
        placed.positions.push_back({x, y});
    }
    PlacedSet out = resolve_overlaps(placed, params, report);
    out.mode = PlacementMode::random;
    return out;
}

}  // namespace timbremap
