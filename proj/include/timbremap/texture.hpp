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

// Grayscale texture labels interpolated between exemplar textures.
//
// Synthesis works in two stages. The spectral stage combines the exemplars'
// Fourier magnitudes as a weighted geometric mean and pairs it with a seeded
// random Hermitian phase, giving a real field whose magnitude spectrum is
// exactly the interpolated one. The histogram stage then remaps that field's
// pixel ranks onto the weight-blended exemplar value distribution, so a
// one-hot weight reproduces the exemplar's pixel histogram exactly.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace timbremap {

struct GrayImage {
    std::size_t size = 0;         // square side
    std::vector<double> pixels;   // row-major, values in [0, 1] unless noted

    double at(std::size_t x, std::size_t y) const { return pixels[y * size + x]; }
    double& at(std::size_t x, std::size_t y) { return pixels[y * size + x]; }
};

struct ExemplarTexture {
    std::string id;
    GrayImage image;
};

bool is_power_of_two(std::size_t v);

/// Exemplar magnitudes (|DFT| / size^2) are floored here before the
/// geometric mean. Without it, a frequency missing from any one weighted
/// exemplar (stripes are zero almost everywhere) vanishes from every blend.
inline constexpr double kMagnitudeFloor = 1e-7;

/// Eight procedural textures: horizontal stripes, vertical stripes, checker,
/// fine noise, coarse blobs, concentric rings, diagonal weave, dot lattice.
std::vector<ExemplarTexture> builtin_exemplars(std::size_t size = 256, std::uint64_t seed = 0);

/// The first eight PNG files (by name) in `dir`, converted to grayscale.
std::vector<ExemplarTexture> load_exemplars(const std::filesystem::path& dir, std::size_t size);

/// |DFT| / size^2 over the full frequency plane (DC is the mean pixel).
std::vector<double> magnitude_spectrum(const GrayImage& image);

/// Power-weighted mean radial frequency (cycles per image), DC excluded.
double radial_spectral_centroid(const GrayImage& image);

class TextureSynthesizer {
public:
    explicit TextureSynthesizer(std::vector<ExemplarTexture> exemplars);

    std::size_t size() const { return size_; }
    std::size_t count() const { return exemplars_.size(); }
    const std::vector<ExemplarTexture>& exemplars() const { return exemplars_; }

    /// Random-phase field with the interpolated magnitude spectrum (not clamped).
    GrayImage spectral_field(std::span<const double> weights, std::uint64_t seed) const;

    /// Full synthesis: spectral field, then histogram matching. Output in [0, 1].
    GrayImage synthesize(std::span<const double> weights, std::uint64_t seed) const;

private:
    std::size_t size_ = 0;
    std::vector<ExemplarTexture> exemplars_;
    std::vector<std::vector<double>> log_magnitude_;  // half-plane, per exemplar
    struct Tagged {
        double value;
        std::size_t exemplar;
    };
    std::vector<Tagged> merged_values_;  // every exemplar pixel, ascending
};

/// One-shot convenience over TextureSynthesizer.
GrayImage synth_texture(std::span<const double> weights, std::span<const ExemplarTexture> exemplars, std::size_t size,
                        std::uint64_t seed);

std::vector<std::uint8_t> encode_png(const GrayImage& image);
GrayImage decode_png(std::span<const std::uint8_t> bytes);
void write_png(const std::filesystem::path& path, const GrayImage& image);

}  // namespace timbremap
