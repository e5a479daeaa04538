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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "timbremap/error.hpp"
#include "timbremap/texture.hpp"

using namespace timbremap;

namespace {

const std::vector<ExemplarTexture>& exemplars64() {
    static const auto ex = builtin_exemplars(64, 0);
    return ex;
}

std::size_t index_of(const std::string& id) {
    const auto& ex = exemplars64();
    for (std::size_t i = 0; i < ex.size(); ++i) {
        if (ex[i].id == id) return i;
    }
    FAIL("missing exemplar " << id);
    return 0;
}

std::vector<double> one_hot(std::size_t i) {
    std::vector<double> w(8, 0.0);
    w[i] = 1.0;
    return w;
}

}  // namespace

TEST_CASE("builtin exemplars are distinct, bounded and deterministic") {
    const auto& ex = exemplars64();
    REQUIRE(ex.size() == 8);
    const std::vector<std::string> ids = {"horizontal_stripes", "vertical_stripes", "checker",        "fine_noise",
                                          "coarse_blobs",       "concentric_rings", "diagonal_weave", "dot_lattice"};
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(ex[i].id == ids[i]);
        CHECK(ex[i].image.size == 64);
        for (double v : ex[i].image.pixels) CHECK((v >= 0.0 && v <= 1.0));
        for (std::size_t j = i + 1; j < 8; ++j) {
            double mad = 0.0;
            for (std::size_t p = 0; p < 64 * 64; ++p) mad += std::abs(ex[i].image.pixels[p] - ex[j].image.pixels[p]);
            CHECK(mad / (64 * 64) > 0.05);
        }
    }
    const auto again = builtin_exemplars(64, 0);
    for (std::size_t i = 0; i < 8; ++i) CHECK(again[i].image.pixels == ex[i].image.pixels);
    CHECK(builtin_exemplars(64, 1)[index_of("fine_noise")].image.pixels != ex[index_of("fine_noise")].image.pixels);
    CHECK_THROWS_AS(builtin_exemplars(32), Error);
    CHECK_THROWS_AS(builtin_exemplars(96), Error);
}

TEST_CASE("stripe energy sits on one frequency axis") {
    for (const char* id : {"horizontal_stripes", "vertical_stripes"}) {
        const GrayImage& img = exemplars64()[index_of(id)].image;
        const auto mag = magnitude_spectrum(img);
        double on_kx0 = 0.0, on_ky0 = 0.0, total = 0.0;
        for (std::size_t ky = 0; ky < 64; ++ky) {
            for (std::size_t kx = 0; kx < 64; ++kx) {
                if (kx == 0 && ky == 0) continue;
                const double p = mag[ky * 64 + kx] * mag[ky * 64 + kx];
                total += p;
                if (kx == 0) on_kx0 += p;
                if (ky == 0) on_ky0 += p;
            }
        }
        // Horizontal stripes vary along y only: energy on the kx = 0 axis.
        const double axis = std::string(id) == "horizontal_stripes" ? on_kx0 : on_ky0;
        CHECK(axis / total > 0.9);
    }
}

TEST_CASE("magnitude spectrum equals a naive DFT") {
    const GrayImage& img = exemplars64()[index_of("diagonal_weave")].image;
    const auto fast = magnitude_spectrum(img);
    const auto slow = oracle::dft2_magnitude(img.pixels, 64);
    double err = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i) err = std::max(err, std::abs(fast[i] - slow[i]));
    CHECK(err < 1e-9);
}

TEST_CASE("one-hot weights reproduce the exemplar spectrum and histogram") {
    const TextureSynthesizer synth(exemplars64());
    for (std::size_t m = 0; m < 8; ++m) {
        const auto w = one_hot(m);
        const GrayImage field = synth.spectral_field(w, 77);
        const auto got = magnitude_spectrum(field);
        const auto want = magnitude_spectrum(exemplars64()[m].image);
        double err = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
        CHECK(err < 1e-6);

        const GrayImage out = synth.synthesize(w, 77);
        auto a = out.pixels, b = exemplars64()[m].image.pixels;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("synthesis is seeded and bounded") {
    const TextureSynthesizer synth(exemplars64());
    std::vector<double> w = {0.1, 0.2, 0.05, 0.15, 0.1, 0.2, 0.1, 0.1};
    const GrayImage a = synth.synthesize(w, 3);
    CHECK(synth.synthesize(w, 3).pixels == a.pixels);
    CHECK(synth.synthesize(w, 4).pixels != a.pixels);
    for (double v : a.pixels) CHECK((v >= 0.0 && v <= 1.0));
    CHECK(synth_texture(w, exemplars64(), 64, 3).pixels == a.pixels);

    // A blend of every exemplar still has structure in its spectral field.
    const GrayImage field = synth.spectral_field(w, 3);
    const auto [lo, hi] = std::minmax_element(field.pixels.begin(), field.pixels.end());
    CHECK(*hi - *lo > 1e-3);
}

TEST_CASE("blended centroid lies between the exemplars'") {
    const TextureSynthesizer synth(exemplars64());
    const std::size_t fine = index_of("fine_noise"), coarse = index_of("coarse_blobs");
    std::vector<double> w(8, 0.0);
    w[fine] = 0.5;
    w[coarse] = 0.5;
    const double cf = radial_spectral_centroid(exemplars64()[fine].image);
    const double cc = radial_spectral_centroid(exemplars64()[coarse].image);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const double mid = radial_spectral_centroid(synth.synthesize(w, seed));
        CHECK(mid > std::min(cf, cc));
        CHECK(mid < std::max(cf, cc));
    }
}

TEST_CASE("synthesis input errors") {
    const TextureSynthesizer synth(exemplars64());
    CHECK_THROWS_AS(synth.synthesize(std::vector<double>(7, 0.1), 0), Error);
    CHECK_THROWS_AS(synth.synthesize(std::vector<double>(8, 0.0), 0), Error);
    try {
        synth_texture(one_hot(0), exemplars64(), 128, 0);
        FAIL("expected size mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parameter);
    }
}

TEST_CASE("PNG round trip and exemplar directories") {
    const GrayImage& img = exemplars64()[index_of("concentric_rings")].image;
    const GrayImage back = decode_png(encode_png(img));
    REQUIRE(back.size == 64);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) CHECK(std::abs(back.pixels[i] - img.pixels[i]) <= 0.5 / 255.0 + 1e-12);
    CHECK_THROWS_AS(decode_png(std::vector<std::uint8_t>{1, 2, 3}), Error);

    fixtures::TempDir dir("png");
    for (std::size_t i = 0; i < 8; ++i) write_png(dir / (std::to_string(i) + "_" + exemplars64()[i].id + ".png"), exemplars64()[i].image);
    const auto loaded = load_exemplars(dir.path(), 64);
    REQUIRE(loaded.size() == 8);
    CHECK(loaded[0].id == "0_horizontal_stripes");
    CHECK_THROWS_AS(load_exemplars(dir.path(), 128), Error);
    std::filesystem::remove(dir / "7_dot_lattice.png");
    CHECK_THROWS_AS(load_exemplars(dir.path(), 64), Error);
}
