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

// Scenes: a placed subset of the library with one label family attached,
// serialized as the canonical JSON dictionary the browser client loads.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timbremap/audio.hpp"
#include "timbremap/cochlea.hpp"
#include "timbremap/embedding.hpp"
#include "timbremap/labels.hpp"
#include "timbremap/layout.hpp"
#include "timbremap/texture.hpp"

namespace timbremap {

enum class LabelMode { baseline, shape, color, texture };

std::string_view to_string(LabelMode mode);
LabelMode label_mode_from_string(std::string_view text);

struct LibraryConfig {
    FilterbankConfig filterbank;
    double frame_rate = kDefaultFrameRate;
    FeatureConfig features;
    UmapParams umap;
    Canvas canvas;
    OverlapParams overlap;
    ColorScheme color_scheme = ColorScheme::wheel_v1;
    HuePath hue_path = HuePath::via_green;
    std::size_t texture_size = 256;
    std::optional<std::filesystem::path> exemplar_dir;
    /// Optional medoid id -> exemplar id override; default pairs sorted
    /// medoid ids with exemplars in their listed order.
    std::map<std::string, std::string> texture_assignment;
    std::uint64_t seed = 0;
};

/// Everything scenes are cut from: per-sample profiles, features, the
/// library-wide embedding and its canvas placement, and all label payloads.
/// Immutable after build() except for the texture cache, which is internally
/// synchronized.
class Library {
public:
    static std::shared_ptr<const Library> build(SampleSet set, const LibraryConfig& config);

    const LibraryConfig& config() const { return config_; }
    const SampleSet& samples() const { return set_; }
    std::size_t size() const { return set_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    std::optional<std::size_t> index_of(std::string_view id) const;

    const Filterbank& filterbank() const { return filterbank_; }
    const std::vector<TimbreProfile>& profiles() const { return profiles_; }
    const std::vector<TimbreDescriptors>& descriptors() const { return descriptors_; }
    const std::vector<FeatureVector>& features() const { return features_; }
    const Embedding2D& embedding() const { return embedding_; }
    /// Whole-library embedding scaled to the canvas (overlaps not resolved).
    const PlacedSet& placement() const { return placement_; }

    const ShapeLabel& shape(std::size_t i) const { return shapes_[i]; }
    const ColorLabel& color(std::size_t i) const { return colors_[i]; }
    const KMedoidsResult& medoids() const { return medoids_; }
    /// Exemplar index paired with each medoid slot.
    const std::vector<std::size_t>& exemplar_for_medoid() const { return exemplar_for_medoid_; }
    const std::vector<double>& texture_weights(std::size_t i) const { return texture_weights_[i]; }

    /// Texture label image, synthesized on first use and cached.
    std::shared_ptr<const GrayImage> texture(std::size_t i) const;
    std::vector<std::uint8_t> texture_png(std::size_t i) const;

private:
    Library() = default;

    LibraryConfig config_;
    SampleSet set_;
    std::vector<std::string> ids_;
    Filterbank filterbank_;
    std::vector<TimbreProfile> profiles_;
    std::vector<TimbreDescriptors> descriptors_;
    std::vector<FeatureVector> features_;
    Embedding2D embedding_;
    PlacedSet placement_;
    std::vector<ShapeLabel> shapes_;
    std::vector<ColorLabel> colors_;
    KMedoidsResult medoids_;
    std::vector<std::size_t> exemplar_for_medoid_;
    std::vector<std::vector<double>> texture_weights_;
    std::unique_ptr<TextureSynthesizer> synth_;

    mutable std::mutex texture_mutex_;
    mutable std::map<std::size_t, std::shared_ptr<const GrayImage>> texture_cache_;
};

struct SceneSample {
    std::string id;
    std::string audio_ref;
    Point position;
    std::optional<std::vector<Point>> shape_path;  // unit coordinates, clockwise, closed
    std::optional<ColorLabel> color;
    std::optional<std::string> texture_ref;

    bool operator==(const SceneSample&) const = default;
};

struct Scene {
    std::string scene_id;
    Canvas canvas;
    PlacementMode placement_mode = PlacementMode::dr;
    LabelMode label_mode = LabelMode::baseline;
    std::vector<SceneSample> samples;
    std::uint64_t seed = 0;

    bool operator==(const Scene&) const = default;
};

std::string audio_ref(std::string_view id);
std::string texture_ref(std::string_view id);

/// Places `ids` (DR: library positions then overlap removal; random: seeded
/// random placement) and attaches the label payload for `label_mode`.
Scene build_scene(const Library& library, std::span<const std::string> ids, PlacementMode placement,
                  LabelMode label_mode, std::uint64_t seed);

/// Canonical form: sorted keys, no whitespace, shortest round-trip numbers.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(std::string_view text);

}  // namespace timbremap
