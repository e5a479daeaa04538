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
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "timbremap/error.hpp"
#include "timbremap/kernels.hpp"

namespace timbremap::kernels {

namespace {

// Transposed direct form II biquad.
class Biquad {
public:
    static Biquad lowpass(double cutoff, double fs) { return make(cutoff, fs, false); }
    static Biquad highpass(double cutoff, double fs) { return make(cutoff, fs, true); }

    double step(double x) {
        const double y = b0_ * x + z1_;
        z1_ = b1_ * x - a1_ * y + z2_;
        z2_ = b2_ * x - a2_ * y;
        return y;
    }

private:
    static Biquad make(double cutoff, double fs, bool high) {
        const double w0 = 2.0 * std::numbers::pi * cutoff / fs;
        const double cw = std::cos(w0);
        const double alpha = std::sin(w0) / std::numbers::sqrt2;  // Butterworth, Q = 1/sqrt(2)
        const double a0 = 1.0 + alpha;
        Biquad q;
        if (high) {
            q.b0_ = (1.0 + cw) / 2.0 / a0;
            q.b1_ = -(1.0 + cw) / a0;
        } else {
            q.b0_ = (1.0 - cw) / 2.0 / a0;
            q.b1_ = (1.0 - cw) / a0;
        }
        q.b2_ = q.b0_;
        q.a1_ = -2.0 * cw / a0;
        q.a2_ = (1.0 - alpha) / a0;
        return q;
    }

    double b0_ = 1.0, b1_ = 0.0, b2_ = 0.0, a1_ = 0.0, a2_ = 0.0;
    double z1_ = 0.0, z2_ = 0.0;
};

constexpr double kEnvelopeCutoff = 20.0;
constexpr double kModulationLow = 20.0;
constexpr double kModulationHigh = 170.0;
// Gammatone bandwidth scale for a 4th-order filter matching the ERB.
constexpr double kGammatoneBandwidthScale = 1.019;

}  // namespace

ChannelFeatures process_channel(std::span<const double> signal, int sample_rate, ChannelGeometry channel,
                                const FrameGrid& grid) {
    const std::size_t n = signal.size();
    const double fs = sample_rate;
    const double omega = 2.0 * std::numbers::pi * channel.center_hz / fs;
    const double pole = std::exp(-2.0 * std::numbers::pi * kGammatoneBandwidthScale * channel.bandwidth_hz / fs);
    const double gain = 1.0 - pole;

    Biquad smooth = Biquad::lowpass(kEnvelopeCutoff, fs);
    Biquad band_hp = Biquad::highpass(kModulationLow, fs);
    Biquad band_lp1 = Biquad::lowpass(kModulationHigh, fs);
    Biquad band_lp2 = Biquad::lowpass(kModulationHigh, fs);

    std::array<std::complex<double>, 4> stage{};
    std::vector<double> envelope(n);
    // Prefix sums of squared modulation-band signal for O(1) window means.
    std::vector<double> band_prefix(n + 1, 0.0);

    double power = 0.0;
    double env_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = omega * static_cast<double>(i);
        const std::complex<double> carrier(std::cos(phase), std::sin(phase));
        std::complex<double> z = signal[i] * std::conj(carrier);
        for (auto& s : stage) {
            s = gain * z + pole * s;
            z = s;
        }
        const double y = 2.0 * (z * carrier).real();
        power += y * y;

        const double rectified = std::max(y, 0.0);
        const double env = smooth.step(rectified);
        envelope[i] = env;
        env_energy += env * env;

        const double band = band_lp2.step(band_lp1.step(band_hp.step(rectified)));
        band_prefix[i + 1] = band_prefix[i] + band * band;
    }

    ChannelFeatures out;
    out.mean_power = n ? power / static_cast<double>(n) : 0.0;
    out.envelope_energy = n ? env_energy / static_cast<double>(n) : 0.0;
    out.envelope_frames.assign(grid.n_frames, 0.0);
    out.modulation_frames.assign(grid.n_frames, 0.0);
    for (std::size_t f = 0; f < grid.n_frames; ++f) {
        const auto begin = std::min(n, static_cast<std::size_t>(std::llround(static_cast<double>(f) * grid.hop)));
        const auto end = std::min(n, std::max(begin + 1, static_cast<std::size_t>(
                                                             std::llround(static_cast<double>(f + 1) * grid.hop))));
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            acc += envelope[i];
        }
        out.envelope_frames[f] = end > begin ? acc / static_cast<double>(end - begin) : 0.0;

        const auto center = static_cast<std::size_t>(std::llround((static_cast<double>(f) + 0.5) * grid.hop));
        const std::size_t lo = center > grid.half_window ? center - grid.half_window : 0;
        const std::size_t hi = std::min(n, center + grid.half_window);
        out.modulation_frames[f] = hi > lo ? (band_prefix[hi] - band_prefix[lo]) / static_cast<double>(hi - lo) : 0.0;
    }
    return out;
}

std::vector<ChannelFeatures> filterbank_channels_serial(std::span<const double> signal, int sample_rate,
                                                        std::span<const ChannelGeometry> channels,
                                                        const FrameGrid& grid) {
    std::vector<ChannelFeatures> out;
    out.reserve(channels.size());
    for (const auto& ch : channels) {
        out.push_back(process_channel(signal, sample_rate, ch, grid));
    }
    return out;
}

std::vector<ChannelFeatures> filterbank_channels_omp(std::span<const double> signal, int sample_rate,
                                                     std::span<const ChannelGeometry> channels,
                                                     const FrameGrid& grid) {
    std::vector<ChannelFeatures> out(channels.size());
    const auto n = static_cast<std::int64_t>(channels.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n; ++c) {
        out[static_cast<std::size_t>(c)] =
            process_channel(signal, sample_rate, channels[static_cast<std::size_t>(c)], grid);
    }
    return out;
}

std::vector<ChannelFeatures> filterbank_channels(std::span<const double> signal, int sample_rate,
                                                 std::span<const ChannelGeometry> channels, const FrameGrid& grid,
                                                 Exec exec) {
    return exec == Exec::serial ? filterbank_channels_serial(signal, sample_rate, channels, grid)
                                : filterbank_channels_omp(signal, sample_rate, channels, grid);
}

}  // namespace timbremap::kernels
