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

// Shared fixtures for the unit tests.

#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "timbremap/audio.hpp"
#include "timbremap/scene.hpp"

namespace fixtures {

/// A small synthetic library (1 s tones) built once per test binary.
inline std::shared_ptr<const timbremap::Library> small_library() {
    static const auto lib = [] {
        timbremap::LibraryConfig config;
        config.texture_size = 64;
        config.umap.n_epochs = 200;
        return timbremap::Library::build(timbremap::synthetic_library(40, 11, 1.0), config);
    }();
    return lib;
}

/// A library of exactly `n` short tones (no caching).
inline std::shared_ptr<const timbremap::Library> library_of(std::size_t n, std::uint64_t seed = 5) {
    timbremap::LibraryConfig config;
    config.texture_size = 64;
    config.umap.n_epochs = 100;
    config.umap.n_neighbors = std::min<std::size_t>(10, n - 1);
    return timbremap::Library::build(timbremap::synthetic_library(n, seed, 0.3), config);
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("timbremap-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace fixtures
