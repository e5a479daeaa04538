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

#include "timbremap/cochlea.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "timbremap/error.hpp"

namespace timbremap {

namespace {

constexpr double kFlatnessFloor = 1e-12;
constexpr double kRoughnessWindow = 0.100;  // seconds

double one_pole_magnitude(double pole, double omega) {
    const std::complex<double> denom = 1.0 - pole * std::exp(std::complex<double>(0.0, -omega));
    return (1.0 - pole) / std::abs(denom);
}

}  // namespace

double erb_bandwidth(double hz) { return 24.7 * (4.37 * hz / 1000.0 + 1.0); }

double erb_number(double hz) { return 21.4 * std::log10(4.37 * hz / 1000.0 + 1.0); }

double erb_number_to_hz(double cams) { return (std::pow(10.0, cams / 21.4) - 1.0) / 4.37 * 1000.0; }

double Filterbank::magnitude_response(std::size_t c, double hz) const {
    require(c < n_channels(), ErrorKind::parameter, "channel index out of range");
    const double fs = sample_rate;
    const double pole = std::exp(-2.0 * std::numbers::pi * 1.019 * bandwidths[c] / fs);
    const double omega = 2.0 * std::numbers::pi * (hz - center_freqs[c]) / fs;
    return std::pow(one_pole_magnitude(pole, omega), 4);
}

Filterbank make_filterbank(int n_channels, double fmin, double fmax, int sample_rate) {
    require(n_channels >= 2, ErrorKind::parameter, "filterbank needs at least two channels");
    require(sample_rate > 0, ErrorKind::parameter, "sample rate must be positive");
    require(fmin > 0.0 && fmin < fmax && fmax < sample_rate / 2.0, ErrorKind::parameter,
            "need 0 < fmin < fmax < Nyquist");
    Filterbank fb;
    fb.sample_rate = sample_rate;
    const double lo = erb_number(fmin);
    const double hi = erb_number(fmax);
    for (int c = 0; c < n_channels; ++c) {
        double hz;
        if (c == 0) {
            hz = fmin;
        } else if (c == n_channels - 1) {
            hz = fmax;
        } else {
            hz = erb_number_to_hz(lo + (hi - lo) * c / (n_channels - 1));
        }
        fb.center_freqs.push_back(hz);
        fb.bandwidths.push_back(erb_bandwidth(hz));
    }
    return fb;
}

TimbreProfile analyze(const AudioSample& sample, const Filterbank& fb, double frame_rate, Exec channel_exec) {
    require(sample.sample_rate == fb.sample_rate, ErrorKind::parameter,
            "sample rate " + std::to_string(sample.sample_rate) + " does not match filterbank rate " +
                std::to_string(fb.sample_rate));
    require(frame_rate >= 50.0 && frame_rate <= fb.sample_rate, ErrorKind::parameter,
            "frame rate must lie in [50 Hz, sample rate]");
    require(!sample.signal.empty(), ErrorKind::empty_input, "sample " + sample.id + " has no signal");

    const double duration = sample.duration();
    kernels::FrameGrid grid;
    grid.n_frames = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(duration * frame_rate + 1e-9)));
    grid.hop = fb.sample_rate / frame_rate;
    grid.half_window = static_cast<std::size_t>(std::llround(kRoughnessWindow * fb.sample_rate / 2.0));

    std::vector<kernels::ChannelGeometry> channels(fb.n_channels());
    for (std::size_t c = 0; c < fb.n_channels(); ++c) {
        channels[c] = {fb.center_freqs[c], fb.bandwidths[c]};
    }
    const auto features = kernels::filterbank_channels(sample.signal, fb.sample_rate, channels, grid, channel_exec);

    TimbreProfile profile;
    profile.frame_rate = frame_rate;
    profile.duration = duration;
    profile.spectral_envelope.resize(fb.n_channels());
    profile.temporal_envelope.assign(grid.n_frames, 0.0);
    profile.roughness_envelope.assign(grid.n_frames, 0.0);

    double envelope_energy = 0.0;
    for (std::size_t c = 0; c < features.size(); ++c) {
        const auto& ch = features[c];
        profile.spectral_envelope[c] = ch.mean_power;
        envelope_energy += ch.envelope_energy;
        for (std::size_t f = 0; f < grid.n_frames; ++f) {
            profile.temporal_envelope[f] += ch.envelope_frames[f];
            profile.roughness_envelope[f] += ch.modulation_frames[f];
        }
    }

    // The rectified envelope is nonnegative, but the 20 Hz smoother can ring
    // slightly below zero after an abrupt offset.
    for (double& v : profile.temporal_envelope) {
        v = std::max(v, 0.0);
    }
    const double peak = *std::max_element(profile.temporal_envelope.begin(), profile.temporal_envelope.end());
    if (peak > 0.0) {
        for (double& v : profile.temporal_envelope) {
            v /= peak;
        }
    }
    if (envelope_energy > 0.0) {
        for (double& v : profile.roughness_envelope) {
            v /= envelope_energy;
        }
    } else {
        std::fill(profile.roughness_envelope.begin(), profile.roughness_envelope.end(), 0.0);
    }
    return profile;
}

std::vector<TimbreProfile> analyze_batch(std::span<const AudioSample> samples, const Filterbank& fb, double frame_rate,
                                         Exec exec) {
    std::vector<TimbreProfile> out(samples.size());
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            out[i] = analyze(samples[i], fb, frame_rate, Exec::serial);
        }
        return out;
    }
    const auto n = static_cast<std::int64_t>(samples.size());
    std::vector<std::exception_ptr> errors(samples.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = analyze(samples[k], fb, frame_rate, Exec::serial);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

TimbreDescriptors descriptors(const TimbreProfile& profile, const Filterbank& fb) {
    const auto& env = profile.spectral_envelope;
    require(env.size() == fb.n_channels(), ErrorKind::parameter, "profile does not come from this filterbank");
    const double total = std::accumulate(env.begin(), env.end(), 0.0);
    if (!(total > 0.0)) fail(ErrorKind::undefined_descriptor, "spectral envelope is all zero");

    double weighted = 0.0;
    double log_sum = 0.0;
    for (std::size_t c = 0; c < env.size(); ++c) {
        weighted += fb.center_freqs[c] * env[c];
        log_sum += std::log(std::max(env[c], kFlatnessFloor));
    }
    TimbreDescriptors d;
    d.spectral_centroid =
        std::clamp(weighted / total, fb.center_freqs.front(), fb.center_freqs.back());
    const double arithmetic = total / static_cast<double>(env.size());
    const double geometric = std::exp(log_sum / static_cast<double>(env.size()));
    d.spectral_flatness = std::clamp(geometric / arithmetic, 0.0, 1.0);
    return d;
}

std::vector<double> resample_envelope(std::span<const double> env, double duration, std::size_t n_points) {
    require(!env.empty(), ErrorKind::parameter, "cannot resample an empty envelope");
    require(n_points >= 2, ErrorKind::parameter, "need at least two output points");
    require(duration > 0.0, ErrorKind::parameter, "duration must be positive");

    std::vector<double> out(n_points);
    const std::size_t last = env.size() - 1;
    for (std::size_t j = 0; j < n_points; ++j) {
        const double pos = static_cast<double>(j) * static_cast<double>(last) / static_cast<double>(n_points - 1);
        const auto lo = std::min(static_cast<std::size_t>(pos), last);
        const std::size_t hi = std::min(lo + 1, last);
        const double frac = pos - static_cast<double>(lo);
        out[j] = env[lo] + (env[hi] - env[lo]) * frac;
    }
    const double in_peak = *std::max_element(env.begin(), env.end());
    const double out_peak = *std::max_element(out.begin(), out.end());
    if (std::abs(in_peak - 1.0) < 1e-12 && out_peak > 0.0) {
        for (double& v : out) {
            v /= out_peak;
        }
    }
    return out;
}

}  // namespace timbremap
