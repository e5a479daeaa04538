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

// ERB-spaced gammatone filterbank and the three per-sample timbre profiles
// (spectral, roughness and temporal envelopes) derived from it.

#pragma once

#include <span>
#include <vector>

#include "timbremap/audio.hpp"
#include "timbremap/kernels.hpp"

namespace timbremap {

/// Equivalent rectangular bandwidth in Hz at frequency `hz`.
double erb_bandwidth(double hz);
/// ERB-number (Cams) of `hz`: 21.4 log10(4.37 f_kHz + 1).
double erb_number(double hz);
double erb_number_to_hz(double cams);

struct Filterbank {
    int sample_rate = kDefaultSampleRate;
    std::vector<double> center_freqs;  // ascending
    std::vector<double> bandwidths;    // ERB at each center

    std::size_t n_channels() const { return center_freqs.size(); }

    /// Magnitude response of channel `c` at `hz`, unity at the center.
    double magnitude_response(std::size_t c, double hz) const;
};

struct FilterbankConfig {
    int n_channels = 42;
    double fmin = 26.0;
    double fmax = 7800.0;
    int sample_rate = kDefaultSampleRate;
};

Filterbank make_filterbank(int n_channels, double fmin, double fmax, int sample_rate);
inline Filterbank make_filterbank(const FilterbankConfig& c = {}) {
    return make_filterbank(c.n_channels, c.fmin, c.fmax, c.sample_rate);
}

inline constexpr double kDefaultFrameRate = 200.0;

struct TimbreProfile {
    std::vector<double> spectral_envelope;   // mean power per channel
    std::vector<double> roughness_envelope;  // per frame
    std::vector<double> temporal_envelope;   // per frame, peak 1
    double frame_rate = kDefaultFrameRate;
    double duration = 0.0;
};

struct TimbreDescriptors {
    double spectral_centroid = 0.0;  // Hz
    double spectral_flatness = 0.0;  // [0, 1]
};

/// `channel_exec` selects the serial or OpenMP channel kernel; both produce
/// identical profiles.
TimbreProfile analyze(const AudioSample& sample, const Filterbank& fb, double frame_rate = kDefaultFrameRate,
                      Exec channel_exec = Exec::parallel);

/// Profiles for every sample, in input order.
std::vector<TimbreProfile> analyze_batch(std::span<const AudioSample> samples, const Filterbank& fb,
                                         double frame_rate = kDefaultFrameRate, Exec exec = Exec::parallel);

TimbreDescriptors descriptors(const TimbreProfile& profile, const Filterbank& fb);

/// Linear-interpolation resample of `env` onto `n_points` equally spaced
/// instants covering [0, duration] inclusive (spacing duration / (n_points - 1)).
std::vector<double> resample_envelope(std::span<const double> env, double duration, std::size_t n_points);

}  // namespace timbremap
