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

#include "timbremap/scene.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <semaphore>
#include <thread>

#include "json.hpp"
#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

using json = nlohmann::json;

namespace {

// Bounds concurrent texture synthesis to the logical core count.
std::counting_semaphore<1024>& synth_slots() {
    static std::counting_semaphore<1024> slots(
        static_cast<std::ptrdiff_t>(std::clamp(std::thread::hardware_concurrency(), 1u, 1024u)));
    return slots;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json to_json_canonical(const Scene& scene) {
    json samples = json::array();
    for (const auto& s : scene.samples) {
        json j = {{"id", s.id}, {"audio_ref", s.audio_ref}, {"x", s.position.x}, {"y", s.position.y}};
        if (s.shape_path) {
            json path = json::array();
            for (const auto& p : *s.shape_path) path.push_back({p.x, p.y});
            j["shape_path"] = std::move(path);
        }
        if (s.color) j["color_hsl"] = {s.color->hue, s.color->saturation, s.color->lightness};
        if (s.texture_ref) j["texture_ref"] = *s.texture_ref;
        samples.push_back(std::move(j));
    }
    return {
        {"scene_id", scene.scene_id},
        {"canvas",
         {{"w", scene.canvas.width},
          {"h", scene.canvas.height},
          {"margin", scene.canvas.margin},
          {"diameter", scene.canvas.diameter}}},
        {"placement_mode", std::string(to_string(scene.placement_mode))},
        {"label_mode", std::string(to_string(scene.label_mode))},
        {"samples", std::move(samples)},
        {"seed", scene.seed},
    };
}

}  // namespace

std::string_view to_string(LabelMode mode) {
    switch (mode) {
        case LabelMode::baseline: return "baseline";
        case LabelMode::shape: return "shape";
        case LabelMode::color: return "color";
        case LabelMode::texture: return "texture";
    }
    return "baseline";
}

LabelMode label_mode_from_string(std::string_view text) {
    if (text == "baseline") return LabelMode::baseline;
    if (text == "shape") return LabelMode::shape;
    if (text == "color") return LabelMode::color;
    if (text == "texture") return LabelMode::texture;
    fail(ErrorKind::parameter, "unknown label mode '" + std::string(text) + "'");
}

std::string audio_ref(std::string_view id) { return "/api/audio/" + std::string(id); }
std::string texture_ref(std::string_view id) { return "/api/texture/" + std::string(id) + ".png"; }

std::shared_ptr<const Library> Library::build(SampleSet set, const LibraryConfig& config) {
    require(set.size() > 0, ErrorKind::empty_set, "library has no samples");
    std::shared_ptr<Library> lib(new Library());
    lib->config_ = config;
    std::sort(set.samples.begin(), set.samples.end(),
              [](const AudioSample& a, const AudioSample& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < set.size(); ++i) {
        require(set.samples[i].id != set.samples[i - 1].id, ErrorKind::parameter,
                "duplicate sample id " + set.samples[i].id);
    }
    lib->set_ = std::move(set);
    for (const auto& s : lib->set_.samples) lib->ids_.push_back(s.id);
    const std::size_t n = lib->ids_.size();

    lib->filterbank_ = make_filterbank(config.filterbank);
    lib->profiles_ = analyze_batch(lib->set_.samples, lib->filterbank_, config.frame_rate);
    lib->descriptors_.reserve(n);
    for (const auto& p : lib->profiles_) lib->descriptors_.push_back(timbremap::descriptors(p, lib->filterbank_));
    lib->features_ = concat_features(lib->profiles_, lib->ids_, config.features);
    lib->embedding_ = embed(lib->features_, config.umap, derive_seed(config.seed, "embed"));
    lib->placement_ = scale_to_canvas(lib->embedding_, config.canvas);

    lib->shapes_.reserve(n);
    for (const auto& p : lib->profiles_) lib->shapes_.push_back(shape_label_from_profile(p));

    if (config.color_scheme == ColorScheme::wheel_v1) {
        lib->colors_ = color_wheel_labels(lib->placement_.positions);
    } else {
        const auto calib = calibrate_centroids(lib->descriptors_);
        for (const auto& d : lib->descriptors_) lib->colors_.push_back(color_descriptor(d, calib, config.hue_path));
    }

    // Texture labels need eight medoids; smaller libraries simply lack them.
    if (n >= kTextureMedoids) {
        lib->medoids_ = kmedoids(lib->features_, kTextureMedoids, derive_seed(config.seed, "medoids"));
        auto exemplars = config.exemplar_dir ? load_exemplars(*config.exemplar_dir, config.texture_size)
                                             : builtin_exemplars(config.texture_size, config.seed);
        lib->exemplar_for_medoid_.resize(kTextureMedoids);
        for (std::size_t s = 0; s < kTextureMedoids; ++s) lib->exemplar_for_medoid_[s] = s;
        if (!config.texture_assignment.empty()) {
            std::vector<bool> used(exemplars.size(), false);
            for (std::size_t s = 0; s < kTextureMedoids; ++s) {
                const auto& mid = lib->medoids_.medoid_ids[s];
                auto it = config.texture_assignment.find(mid);
                require(it != config.texture_assignment.end(), ErrorKind::parameter,
                        "texture assignment does not cover medoid " + mid);
                auto ex = std::find_if(exemplars.begin(), exemplars.end(),
                                       [&](const ExemplarTexture& e) { return e.id == it->second; });
                require(ex != exemplars.end(), ErrorKind::parameter, "unknown exemplar " + it->second);
                const auto e = static_cast<std::size_t>(ex - exemplars.begin());
                require(!used[e], ErrorKind::parameter, "exemplar " + it->second + " assigned twice");
                used[e] = true;
                lib->exemplar_for_medoid_[s] = e;
            }
        }
        std::vector<FeatureVector> medoid_vectors;
        for (std::size_t m : lib->medoids_.medoids) medoid_vectors.push_back(lib->features_[m]);
        lib->texture_weights_.reserve(n);
        for (const auto& f : lib->features_) lib->texture_weights_.push_back(timbremap::texture_weights(f.values, medoid_vectors));
        lib->synth_ = std::make_unique<TextureSynthesizer>(std::move(exemplars));
    }
    return lib;
}

std::optional<std::size_t> Library::index_of(std::string_view id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - ids_.begin());
}

std::shared_ptr<const GrayImage> Library::texture(std::size_t i) const {
    require(synth_ != nullptr, ErrorKind::parameter, "texture labels need at least eight samples");
    require(i < size(), ErrorKind::parameter, "sample index out of range");
    {
        std::lock_guard lock(texture_mutex_);
        if (auto it = texture_cache_.find(i); it != texture_cache_.end()) return it->second;
    }
    std::vector<double> weights(synth_->count(), 0.0);
    for (std::size_t s = 0; s < kTextureMedoids; ++s) weights[exemplar_for_medoid_[s]] = texture_weights_[i][s];
    synth_slots().acquire();
    std::shared_ptr<const GrayImage> image;
    try {
        image = std::make_shared<const GrayImage>(synth_->synthesize(weights, derive_seed(config_.seed, ids_[i])));
    } catch (...) {
        synth_slots().release();
        throw;
    }
    synth_slots().release();
    std::lock_guard lock(texture_mutex_);
    return texture_cache_.emplace(i, std::move(image)).first->second;
}

std::vector<std::uint8_t> Library::texture_png(std::size_t i) const { return encode_png(*texture(i)); }

Scene build_scene(const Library& library, std::span<const std::string> ids, PlacementMode placement,
                  LabelMode label_mode, std::uint64_t seed) {
    require(!ids.empty(), ErrorKind::empty_set, "scene has no samples");
    std::vector<std::size_t> index;
    index.reserve(ids.size());
    for (const auto& id : ids) {
        auto i = library.index_of(id);
        if (!i) fail(ErrorKind::not_found, "sample " + id + " is not in the library");
        index.push_back(*i);
    }

    const auto& config = library.config();
    PlacedSet placed;
    if (placement == PlacementMode::dr) {
        placed.ids.assign(ids.begin(), ids.end());
        placed.canvas = config.canvas;
        placed.mode = PlacementMode::dr;
        placed.seed = seed;
        for (std::size_t i : index) placed.positions.push_back(library.placement().positions[i]);
        placed = resolve_overlaps(placed, config.overlap);
    } else {
        placed = random_placement(ids, config.canvas, seed, config.overlap);
    }

    Scene scene;
    scene.canvas = config.canvas;
    scene.placement_mode = placement;
    scene.label_mode = label_mode;
    scene.seed = seed;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const std::size_t i = index[k];
        SceneSample s;
        s.id = ids[k];
        s.audio_ref = audio_ref(ids[k]);
        s.position = placed.positions[k];
        switch (label_mode) {
            case LabelMode::baseline: break;
            case LabelMode::shape: s.shape_path = library.shape(i).polygon; break;
            case LabelMode::color: s.color = library.color(i); break;
            case LabelMode::texture:
                require(library.medoids().medoids.size() == kTextureMedoids, ErrorKind::parameter,
                        "texture labels need at least eight samples");
                s.texture_ref = texture_ref(ids[k]);
                break;
        }
        scene.samples.push_back(std::move(s));
    }
    scene.scene_id = "s" + hex64(fnv1a(scene_to_json(scene)));
    return scene;
}

std::string scene_to_json(const Scene& scene) { return to_json_canonical(scene).dump(); }

Scene scene_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
        Scene scene;
        scene.scene_id = j.at("scene_id").get<std::string>();
        const auto& c = j.at("canvas");
        scene.canvas = {c.at("w").get<double>(), c.at("h").get<double>(), c.at("margin").get<double>(),
                        c.at("diameter").get<double>()};
        scene.placement_mode = placement_mode_from_string(j.at("placement_mode").get<std::string>());
        scene.label_mode = label_mode_from_string(j.at("label_mode").get<std::string>());
        scene.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& js : j.at("samples")) {
            SceneSample s;
            s.id = js.at("id").get<std::string>();
            s.audio_ref = js.value("audio_ref", audio_ref(s.id));
            s.position = {js.at("x").get<double>(), js.at("y").get<double>()};
            if (js.contains("shape_path")) {
                std::vector<Point> path;
                for (const auto& p : js["shape_path"]) path.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
                s.shape_path = std::move(path);
            }
            if (js.contains("color_hsl")) {
                const auto& h = js["color_hsl"];
                s.color = ColorLabel{h.at(0).get<double>(), h.at(1).get<double>(), h.at(2).get<double>(),
                                     ColorScheme::wheel_v1};
            }
            if (js.contains("texture_ref")) s.texture_ref = js["texture_ref"].get<std::string>();
            scene.samples.push_back(std::move(s));
        }
        return scene;
    } catch (const json::exception& e) {
        fail(ErrorKind::parameter, std::string("malformed scene JSON: ") + e.what());
    }
}

}  // namespace timbremap
