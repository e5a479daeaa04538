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

// study.toml: library source, analysis hyperparameters, canvas, task counts
// and server settings. Every key is optional; unknown keys are rejected.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "timbremap/audio.hpp"
#include "timbremap/scene.hpp"
#include "timbremap/study.hpp"

namespace timbremap {

struct LibrarySource {
    std::optional<std::filesystem::path> dir;
    MetaFilter filter;
    std::size_t synthetic = 40;  // generated when no directory is given
    std::uint64_t synthetic_seed = 0;
    int sample_rate = kDefaultSampleRate;
};

struct StudyConfig {
    LibrarySource source;
    LibraryConfig library;
    TaskCounts counts;
    std::uint64_t master_seed = 0;
    std::filesystem::path results = "results.jsonl";
    std::optional<std::filesystem::path> static_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
};

/// Relative paths are resolved against `base_dir`.
StudyConfig parse_study_config(std::string_view text, const std::filesystem::path& base_dir = {});
StudyConfig load_study_config(const std::filesystem::path& path);

/// Scans the directory, or synthesizes a library when none is set.
SampleSet load_library(const LibrarySource& source);

HuePath hue_path_from_string(std::string_view text);

}  // namespace timbremap
