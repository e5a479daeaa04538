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

#include "timbremap/texture.hpp"

#include <fftw3.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numbers>
#include <numeric>

#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

namespace {

using Complex = std::complex<double>;

// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

class Plan {
public:
    template <typename Make>
    explicit Plan(Make make) {
        std::lock_guard lock(plan_mutex());
        plan_ = make();
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(plan_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_ = nullptr;
};

fftw_complex* as_fftw(std::vector<Complex>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

std::size_t half_width(std::size_t size) { return size / 2 + 1; }

std::vector<Complex> forward_half(const GrayImage& image) {
    const int n = static_cast<int>(image.size);
    std::vector<double> in = image.pixels;
    std::vector<Complex> out(image.size * half_width(image.size));
    Plan plan([&] { return fftw_plan_dft_r2c_2d(n, n, in.data(), as_fftw(out), FFTW_ESTIMATE); });
    plan.execute();
    return out;
}

GrayImage inverse_half(std::vector<Complex> spectrum, std::size_t size) {
    const int n = static_cast<int>(size);
    GrayImage image;
    image.size = size;
    image.pixels.resize(size * size);
    Plan plan([&] { return fftw_plan_dft_c2r_2d(n, n, as_fftw(spectrum), image.pixels.data(), FFTW_ESTIMATE); });
    plan.execute();
    const double scale = 1.0 / static_cast<double>(size * size);
    for (double& v : image.pixels) v *= scale;
    return image;
}

void normalize_unit(std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo;
    const double span = *hi - *lo;
    for (double& x : v) x = span > 0.0 ? (x - a) / span : 0.5;
}

GrayImage blank(std::size_t size) {
    GrayImage g;
    g.size = size;
    g.pixels.assign(size * size, 0.0);
    return g;
}

// Periodic value noise on a coarse lattice with smoothstep interpolation.
GrayImage value_noise(std::size_t size, std::size_t cells, Rng& rng) {
    std::vector<double> lattice(cells * cells);
    for (double& v : lattice) v = rng.uniform();
    GrayImage g = blank(size);
    const double pitch = static_cast<double>(size) / static_cast<double>(cells);
    auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const double fx = x / pitch, fy = y / pitch;
            const auto x0 = static_cast<std::size_t>(fx) % cells, y0 = static_cast<std::size_t>(fy) % cells;
            const std::size_t x1 = (x0 + 1) % cells, y1 = (y0 + 1) % cells;
            const double tx = smooth(fx - std::floor(fx)), ty = smooth(fy - std::floor(fy));
            const double top = lattice[y0 * cells + x0] * (1 - tx) + lattice[y0 * cells + x1] * tx;
            const double bottom = lattice[y1 * cells + x0] * (1 - tx) + lattice[y1 * cells + x1] * tx;
            g.at(x, y) = top * (1 - ty) + bottom * ty;
        }
    }
    normalize_unit(g.pixels);
    return g;
}

}  // namespace

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::vector<ExemplarTexture> builtin_exemplars(std::size_t size, std::uint64_t seed) {
    require(is_power_of_two(size) && size >= 64, ErrorKind::parameter, "exemplar size must be a power of two >= 64");
    Rng rng(seed);
    const double s = static_cast<double>(size);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<ExemplarTexture> out;

    {
        GrayImage g = blank(size);
        const double phase = rng.uniform(0.0, two_pi);
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x) g.at(x, y) = 0.5 + 0.5 * std::sin(two_pi * 16.0 * y / s + phase);
        out.push_back({"horizontal_stripes", std::move(g)});
    }
    {
        GrayImage g = blank(size);
        const double phase = rng.uniform(0.0, two_pi);
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x) g.at(x, y) = 0.5 + 0.5 * std::sin(two_pi * 6.0 * x / s + phase);
        out.push_back({"vertical_stripes", std::move(g)});
    }
    {
        GrayImage g = blank(size);
        const std::size_t cell = size / 8;
        const std::size_t shift = static_cast<std::size_t>(rng.below(cell));
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x)
                g.at(x, y) = (((x + shift) / cell + (y + shift) / cell) % 2) ? 0.9 : 0.1;
        out.push_back({"checker", std::move(g)});
    }
    {
        GrayImage g = blank(size);
        for (double& v : g.pixels) v = rng.uniform();
        out.push_back({"fine_noise", std::move(g)});
    }
    out.push_back({"coarse_blobs", value_noise(size, 8, rng)});
    {
        GrayImage g = blank(size);
        const double cx = s / 2.0 + rng.uniform(-4.0, 4.0), cy = s / 2.0 + rng.uniform(-4.0, 4.0);
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x)
                g.at(x, y) = 0.5 + 0.5 * std::cos(two_pi * std::hypot(x - cx, y - cy) / (s / 12.0));
        out.push_back({"concentric_rings", std::move(g)});
    }
    {
        GrayImage g = blank(size);
        const std::size_t cell = size / 4;
        const double period = s / 32.0;
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x) {
                const bool even = ((x / cell) + (y / cell)) % 2 == 0;
                const double u = even ? static_cast<double>(x + y) : static_cast<double>(x + size - y);
                g.at(x, y) = 0.5 + 0.5 * std::cos(two_pi * u / period);
            }
        out.push_back({"diagonal_weave", std::move(g)});
    }
    {
        GrayImage g = blank(size);
        const double pitch = s / 8.0;
        const double sigma = s / 48.0;
        const double ox = rng.uniform(0.0, pitch), oy = rng.uniform(0.0, pitch);
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x) {
                const double dx = std::remainder(x - ox, pitch);
                const double dy = std::remainder(y - oy, pitch);
                g.at(x, y) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            }
        out.push_back({"dot_lattice", std::move(g)});
    }
    return out;
}

std::vector<ExemplarTexture> load_exemplars(const std::filesystem::path& dir, std::size_t size) {
    namespace fs = std::filesystem;
    require(fs::is_directory(dir), ErrorKind::io, dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    require(files.size() >= 8, ErrorKind::parameter, "need at least eight exemplar PNGs in " + dir.string());
    files.resize(8);
    std::vector<ExemplarTexture> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        GrayImage img = decode_png(bytes);
        require(img.size == size, ErrorKind::parameter,
                f.string() + " is not " + std::to_string(size) + "x" + std::to_string(size));
        out.push_back({f.stem().string(), std::move(img)});
    }
    return out;
}

std::vector<double> magnitude_spectrum(const GrayImage& image) {
    require(image.size > 0 && image.pixels.size() == image.size * image.size, ErrorKind::parameter,
            "malformed image");
    const int n = static_cast<int>(image.size);
    std::vector<Complex> in(image.pixels.begin(), image.pixels.end());
    std::vector<Complex> out(in.size());
    Plan plan([&] { return fftw_plan_dft_2d(n, n, as_fftw(in), as_fftw(out), FFTW_FORWARD, FFTW_ESTIMATE); });
    plan.execute();
    std::vector<double> mag(out.size());
    const double scale = 1.0 / static_cast<double>(in.size());
    for (std::size_t i = 0; i < out.size(); ++i) mag[i] = std::abs(out[i]) * scale;
    return mag;
}

double radial_spectral_centroid(const GrayImage& image) {
    const auto mag = magnitude_spectrum(image);
    const auto n = static_cast<std::ptrdiff_t>(image.size);
    double weighted = 0.0, total = 0.0;
    for (std::ptrdiff_t ky = 0; ky < n; ++ky) {
        for (std::ptrdiff_t kx = 0; kx < n; ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double fy = static_cast<double>(ky <= n / 2 ? ky : ky - n);
            const double fx = static_cast<double>(kx <= n / 2 ? kx : kx - n);
            const double p = mag[static_cast<std::size_t>(ky * n + kx)];
            weighted += p * p * std::hypot(fx, fy);
            total += p * p;
        }
    }
    return total > 0.0 ? weighted / total : 0.0;
}

TextureSynthesizer::TextureSynthesizer(std::vector<ExemplarTexture> exemplars) : exemplars_(std::move(exemplars)) {
    require(!exemplars_.empty(), ErrorKind::parameter, "no exemplar textures");
    size_ = exemplars_.front().image.size;
    require(is_power_of_two(size_), ErrorKind::parameter, "exemplar size must be a power of two");
    for (std::size_t m = 0; m < exemplars_.size(); ++m) {
        const auto& img = exemplars_[m].image;
        require(img.size == size_ && img.pixels.size() == size_ * size_, ErrorKind::parameter,
                "exemplar " + exemplars_[m].id + " differs in size");
        const auto spectrum = forward_half(img);
        const double floor = kMagnitudeFloor * static_cast<double>(size_ * size_);  // unnormalized transform
        std::vector<double> logmag(spectrum.size());
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            logmag[i] = std::log(std::max(std::abs(spectrum[i]), floor));
        }
        log_magnitude_.push_back(std::move(logmag));
        for (double v : img.pixels) {
            require(v >= 0.0 && v <= 1.0, ErrorKind::parameter, "exemplar pixels must lie in [0, 1]");
            merged_values_.push_back({v, m});
        }
    }
    std::stable_sort(merged_values_.begin(), merged_values_.end(),
                     [](const Tagged& a, const Tagged& b) { return a.value < b.value; });
}

GrayImage TextureSynthesizer::spectral_field(std::span<const double> weights, std::uint64_t seed) const {
    require(weights.size() == exemplars_.size(), ErrorKind::parameter, "one weight per exemplar required");
    for (double w : weights) require(w >= 0.0 && std::isfinite(w), ErrorKind::parameter, "weights must be >= 0");

    // Phase of seeded white noise is uniform and already Hermitian.
    GrayImage noise = blank(size_);
    Rng rng(seed);
    for (double& v : noise.pixels) v = rng.uniform(-1.0, 1.0);
    auto spectrum = forward_half(noise);

    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        double logmag = 0.0;
        for (std::size_t m = 0; m < weights.size(); ++m) {
            if (weights[m] != 0.0) logmag += weights[m] * log_magnitude_[m][i];
        }
        const double mag = std::exp(logmag);
        const double a = std::abs(spectrum[i]);
        spectrum[i] = a > 0.0 ? spectrum[i] * (mag / a) : Complex(mag, 0.0);
    }
    return inverse_half(std::move(spectrum), size_);
}

GrayImage TextureSynthesizer::synthesize(std::span<const double> weights, std::uint64_t seed) const {
    GrayImage field = spectral_field(weights, seed);
    const std::size_t count = field.pixels.size();

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return field.pixels[a] < field.pixels[b]; });

    // Quantile r of the output takes the value where the weight-blended
    // exemplar CDF first reaches (r + 1/2) / count.
    const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
    require(total_weight > 0.0, ErrorKind::parameter, "weights sum to zero");
    const double per_pixel = 1.0 / static_cast<double>(size_ * size_);
    GrayImage out = blank(size_);
    double cumulative = 0.0;
    std::size_t cursor = 0;
    double last_value = 0.0;
    for (std::size_t r = 0; r < count; ++r) {
        const double q = (static_cast<double>(r) + 0.5) / static_cast<double>(count);
        while (cumulative < q && cursor < merged_values_.size()) {
            const auto& t = merged_values_[cursor++];
            const double w = weights[t.exemplar] / total_weight;
            if (w > 0.0) {
                cumulative += w * per_pixel;
                last_value = t.value;
            }
        }
        out.pixels[order[r]] = last_value;
    }
    return out;
}

GrayImage synth_texture(std::span<const double> weights, std::span<const ExemplarTexture> exemplars, std::size_t size,
                        std::uint64_t seed) {
    require(is_power_of_two(size), ErrorKind::parameter, "texture size must be a power of two");
    for (const auto& e : exemplars) {
        require(e.image.size == size, ErrorKind::parameter, "exemplar " + e.id + " does not match requested size");
    }
    TextureSynthesizer synth({exemplars.begin(), exemplars.end()});
    return synth.synthesize(weights, seed);
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
    require(image.size > 0 && image.pixels.size() == image.size * image.size, ErrorKind::parameter, "malformed image");
    std::vector<std::uint8_t> gray(image.pixels.size());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        gray[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.pixels[i], 0.0, 1.0) * 255.0));
    }
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.size);
    png.height = static_cast<png_uint_32>(image.size);
    png.format = PNG_FORMAT_GRAY;
    png_alloc_size_t bytes = 0;
    if (!png_image_write_to_memory(&png, nullptr, &bytes, 0, gray.data(), 0, nullptr)) {
        fail(ErrorKind::io, std::string("PNG sizing failed: ") + png.message);
    }
    std::vector<std::uint8_t> out(bytes);
    if (!png_image_write_to_memory(&png, out.data(), &bytes, 0, gray.data(), 0, nullptr)) {
        fail(ErrorKind::io, std::string("PNG encoding failed: ") + png.message);
    }
    out.resize(bytes);
    return out;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
        fail(ErrorKind::decode, std::string("PNG read failed: ") + png.message);
    }
    png.format = PNG_FORMAT_GRAY;
    if (png.width != png.height) {
        png_image_free(&png);
        fail(ErrorKind::parameter, "texture images must be square");
    }
    std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, gray.data(), 0, nullptr)) {
        fail(ErrorKind::decode, std::string("PNG decode failed: ") + png.message);
    }
    GrayImage img;
    img.size = png.width;
    img.pixels.resize(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) img.pixels[i] = gray[i] / 255.0;
    return img;
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace timbremap
