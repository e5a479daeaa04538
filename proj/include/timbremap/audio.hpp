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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace timbremap {

/// Internal analysis rate; NSynth ships at 16 kHz.
inline constexpr int kDefaultSampleRate = 16000;

struct SampleMeta {
    std::optional<int> pitch;     // MIDI note, [0, 127]
    std::optional<int> velocity;
    std::optional<std::string> source_path;
    std::optional<std::string> family;

    bool operator==(const SampleMeta&) const = default;
};

struct AudioSample {
    std::string id;
    std::vector<double> signal;
    int sample_rate = kDefaultSampleRate;
    SampleMeta meta;

    double duration() const { return static_cast<double>(signal.size()) / sample_rate; }
    bool operator==(const AudioSample&) const = default;
};

/// Parameters for a deterministic test tone with known timbral ground truth.
struct SynthSpec {
    double fundamental = 440.0;
    int n_harmonics = 1;
    double harmonic_rolloff = 1.0;  // partial k has amplitude k^-rolloff
    double attack = 0.01;           // linear ramp, seconds
    double decay = 0.0;             // exponential time constant after the attack; 0 = sustain
    double am_rate = 0.0;
    double am_depth = 0.0;
    double noise_mix = 0.0;
    double duration = 4.0;
    std::uint64_t seed = 0;
};

/// Sorted by id, ids unique.
struct SampleSet {
    std::vector<AudioSample> samples;

    std::size_t size() const { return samples.size(); }
    const AudioSample* find(const std::string& id) const;
};

struct ScanResult {
    SampleSet set;
    std::size_t skipped = 0;
};

/// Conjunction of optional metadata constraints. Unset fields match anything;
/// a set field rejects samples whose metadata is missing.
struct MetaFilter {
    std::optional<int> pitch;
    std::optional<int> velocity;
    std::optional<std::string> family;

    bool matches(const SampleMeta& meta) const;
};

// --- waveform container -------------------------------------------------

struct PcmData {
    int sample_rate = 0;
    int channels = 0;
    std::vector<std::vector<double>> channel_data;  // one vector per channel
};

/// Decodes a RIFF/WAVE byte buffer: PCM 16/24-bit, IEEE float 32-bit, and
/// WAVE_FORMAT_EXTENSIBLE wrapping either; 1 or 2 channels.
PcmData decode_wav(std::span<const std::uint8_t> bytes);

/// Encodes mono audio as 16-bit PCM (or 32-bit float when `float32`).
std::vector<std::uint8_t> encode_wav(std::span<const double> signal, int sample_rate, bool float32 = false);
std::vector<std::uint8_t> encode_wav(const PcmData& pcm, int bits);

void write_wav(const std::filesystem::path& path, std::span<const double> signal, int sample_rate, bool float32 = false);

// --- operations ----------------------------------------------------------

/// Linear-interpolation resampler. Output length is round(len * to / from).
std::vector<double> resample_linear(std::span<const double> input, int from_rate, int to_rate);

/// Best-effort parse of NSynth names `family_source_instrument-pitch-velocity`.
SampleMeta parse_nsynth_name(const std::string& stem);

AudioSample load_sample(const std::filesystem::path& path, int target_rate = kDefaultSampleRate);

/// Recursively loads every decodable `.wav` below `dir` whose metadata passes
/// `filter`. Undecodable files are counted in `skipped`.
ScanResult scan_library(const std::filesystem::path& dir, const MetaFilter& filter = {},
                        int target_rate = kDefaultSampleRate);

AudioSample synth_sample(const SynthSpec& spec, int sample_rate = kDefaultSampleRate, std::string id = "synth");

/// A varied deterministic library of synthetic tones (used when no sample
/// directory is available, and by the simulation harness).
SampleSet synthetic_library(std::size_t count, std::uint64_t seed, double duration = 4.0,
                            int sample_rate = kDefaultSampleRate);

}  // namespace timbremap
