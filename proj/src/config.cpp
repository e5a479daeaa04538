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

#include "timbremap/config.hpp"

#include <fstream>
#include <initializer_list>
#include <iterator>

#include "toml.hpp"
#include "timbremap/error.hpp"

namespace timbremap {

namespace {

void check_keys(const toml::table& table, std::string_view name, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : table) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key.str() == a;
        require(ok, ErrorKind::parameter, "unknown key '" + std::string(key.str()) + "' in [" + std::string(name) + "]");
    }
}

template <typename T>
void read(const toml::table& t, std::string_view key, T& out) {
    const toml::node* node = t.get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
        auto v = node->value<bool>();
        require(v.has_value(), ErrorKind::parameter, "'" + std::string(key) + "' must be a boolean");
        out = *v;
    } else if constexpr (std::is_integral_v<T>) {
        auto v = node->value<std::int64_t>();
        require(v.has_value() && *v >= 0, ErrorKind::parameter, "'" + std::string(key) + "' must be a nonnegative integer");
        out = static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
        auto v = node->value<double>();
        require(v.has_value(), ErrorKind::parameter, "'" + std::string(key) + "' must be a number");
        out = *v;
    } else {
        auto v = node->value<std::string>();
        require(v.has_value(), ErrorKind::parameter, "'" + std::string(key) + "' must be a string");
        out = *v;
    }
}

template <typename T>
void read_optional(const toml::table& t, std::string_view key, std::optional<T>& out) {
    if (!t.contains(key)) return;
    T value{};
    read(t, key, value);
    out = value;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

const toml::table* section(const toml::table& root, std::string_view name) {
    const toml::node* node = root.get(name);
    if (!node) return nullptr;
    const toml::table* t = node->as_table();
    require(t != nullptr, ErrorKind::parameter, "[" + std::string(name) + "] must be a table");
    return t;
}

}  // namespace

HuePath hue_path_from_string(std::string_view text) {
    if (text == "via-green") return HuePath::via_green;
    if (text == "via-magenta") return HuePath::via_magenta;
    fail(ErrorKind::parameter, "hue path must be via-green or via-magenta");
}

StudyConfig parse_study_config(std::string_view text, const std::filesystem::path& base_dir) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        fail(ErrorKind::parameter, std::string("study config: ") + std::string(e.description()));
    }
    check_keys(root, "root", {"library", "features", "embedding", "canvas", "overlap", "labels", "study", "server"});
    StudyConfig c;
    LibraryConfig& lib = c.library;

    if (const auto* t = section(root, "library")) {
        check_keys(*t, "library", {"dir", "pitch", "velocity", "family", "synthetic", "seed", "sample_rate"});
        std::string dir;
        read(*t, "dir", dir);
        if (!dir.empty()) c.source.dir = resolve(base_dir, dir);
        read_optional(*t, "pitch", c.source.filter.pitch);
        read_optional(*t, "velocity", c.source.filter.velocity);
        read_optional(*t, "family", c.source.filter.family);
        read(*t, "synthetic", c.source.synthetic);
        read(*t, "seed", c.source.synthetic_seed);
        read(*t, "sample_rate", c.source.sample_rate);
    }
    lib.filterbank.sample_rate = c.source.sample_rate;
    if (const auto* t = section(root, "features")) {
        check_keys(*t, "features", {"channels", "fmin", "fmax", "frame_rate", "d_pca", "time_points"});
        read(*t, "channels", lib.filterbank.n_channels);
        read(*t, "fmin", lib.filterbank.fmin);
        read(*t, "fmax", lib.filterbank.fmax);
        read(*t, "frame_rate", lib.frame_rate);
        read(*t, "d_pca", lib.features.d_pca);
        read(*t, "time_points", lib.features.time_points);
    }
    if (const auto* t = section(root, "embedding")) {
        check_keys(*t, "embedding", {"n_neighbors", "min_dist", "n_epochs", "spread", "negative_sample_rate",
                                     "learning_rate", "seed"});
        read(*t, "n_neighbors", lib.umap.n_neighbors);
        read(*t, "min_dist", lib.umap.min_dist);
        read(*t, "n_epochs", lib.umap.n_epochs);
        read(*t, "spread", lib.umap.spread);
        read(*t, "negative_sample_rate", lib.umap.negative_sample_rate);
        read(*t, "learning_rate", lib.umap.learning_rate);
        read(*t, "seed", lib.seed);
    }
    if (const auto* t = section(root, "canvas")) {
        check_keys(*t, "canvas", {"width", "height", "margin", "diameter"});
        read(*t, "width", lib.canvas.width);
        read(*t, "height", lib.canvas.height);
        read(*t, "margin", lib.canvas.margin);
        read(*t, "diameter", lib.canvas.diameter);
    }
    lib.canvas.validate();
    if (const auto* t = section(root, "overlap")) {
        check_keys(*t, "overlap", {"max_iters", "stiffness", "padding"});
        read(*t, "max_iters", lib.overlap.max_iters);
        read(*t, "stiffness", lib.overlap.stiffness);
        read(*t, "padding", lib.overlap.padding);
    }
    if (const auto* t = section(root, "labels")) {
        check_keys(*t, "labels", {"color_scheme", "hue_path", "exemplars", "texture_size", "texture_assignment"});
        std::string s;
        read(*t, "color_scheme", s);
        if (!s.empty()) lib.color_scheme = color_scheme_from_string(s);
        s.clear();
        read(*t, "hue_path", s);
        if (!s.empty()) lib.hue_path = hue_path_from_string(s);
        s.clear();
        read(*t, "exemplars", s);
        if (!s.empty()) lib.exemplar_dir = resolve(base_dir, s);
        read(*t, "texture_size", lib.texture_size);
        if (const auto* a = section(*t, "texture_assignment")) {
            for (const auto& [medoid, exemplar] : *a) {
                auto v = exemplar.value<std::string>();
                require(v.has_value(), ErrorKind::parameter, "texture_assignment values must be exemplar ids");
                lib.texture_assignment[std::string(medoid.str())] = *v;
            }
        }
    }
    if (const auto* t = section(root, "study")) {
        check_keys(*t, "study", {"b_r", "b_dr", "l_dr", "l_r", "master_seed", "results", "static_dir"});
        read(*t, "b_r", c.counts.b_r);
        read(*t, "b_dr", c.counts.b_dr);
        read(*t, "l_dr", c.counts.l_dr);
        read(*t, "l_r", c.counts.l_r);
        read(*t, "master_seed", c.master_seed);
        std::string s;
        read(*t, "results", s);
        if (!s.empty()) c.results = resolve(base_dir, s);
        s.clear();
        read(*t, "static_dir", s);
        if (!s.empty()) c.static_dir = resolve(base_dir, s);
    }
    for (std::size_t n : {c.counts.b_r, c.counts.b_dr, c.counts.l_dr, c.counts.l_r}) {
        require(n >= 5 && n <= 10, ErrorKind::parameter, "task counts must lie in [5, 10]");
    }
    if (const auto* t = section(root, "server")) {
        check_keys(*t, "server", {"host", "port"});
        read(*t, "host", c.host);
        read(*t, "port", c.port);
    }
    return c;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read " + path.string());
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_study_config(text, path.parent_path());
}

SampleSet load_library(const LibrarySource& source) {
    if (source.dir) {
        auto scan = scan_library(*source.dir, source.filter, source.sample_rate);
        require(scan.set.size() > 0, ErrorKind::empty_set, "no matching samples under " + source.dir->string());
        return std::move(scan.set);
    }
    require(source.synthetic > 0, ErrorKind::parameter, "no library directory and no synthetic sample count");
    return synthetic_library(source.synthetic, source.synthetic_seed, 4.0, source.sample_rate);
}

}  // namespace timbremap
