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

#include "timbremap/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <regex>

#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

namespace {

constexpr double kPeakTarget = 0.99;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
    return std::memcmp(b.data() + at, tag, 4) == 0;
}

void peak_normalize(std::vector<double>& signal) {
    double peak = 0.0;
    for (double v : signal) {
        peak = std::max(peak, std::abs(v));
    }
    if (peak == 0.0) {
        return;
    }
    const double gain = kPeakTarget / peak;
    for (double& v : signal) {
        v *= gain;
    }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::decode, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

const AudioSample* SampleSet::find(const std::string& id) const {
    auto it = std::lower_bound(samples.begin(), samples.end(), id,
                               [](const AudioSample& s, const std::string& key) { return s.id < key; });
    return (it != samples.end() && it->id == id) ? &*it : nullptr;
}

bool MetaFilter::matches(const SampleMeta& meta) const {
    if (pitch && meta.pitch != pitch) return false;
    if (velocity && meta.velocity != velocity) return false;
    if (family && meta.family != family) return false;
    return true;
}

PcmData decode_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
        fail(ErrorKind::decode, "not a RIFF/WAVE container");
    }
    int format = 0;
    int channels = 0;
    int rate = 0;
    int bits = 0;
    int block_align = 0;
    std::span<const std::uint8_t> data;
    bool have_fmt = false;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t size = read_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) {
            // Tolerate a truncated trailing data chunk; anything else is corrupt.
            if (!tag_is(bytes, pos, "data")) {
                fail(ErrorKind::decode, "chunk overruns file");
            }
        }
        const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
        if (tag_is(bytes, pos, "fmt ")) {
            if (avail < 16) fail(ErrorKind::decode, "short fmt chunk");
            format = read_u16(bytes, body);
            channels = read_u16(bytes, body + 2);
            rate = static_cast<int>(read_u32(bytes, body + 4));
            block_align = read_u16(bytes, body + 12);
            bits = read_u16(bytes, body + 14);
            if (format == 0xFFFE) {
                if (avail < 26) fail(ErrorKind::decode, "short extensible fmt chunk");
                format = read_u16(bytes, body + 24);
            }
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            data = bytes.subspan(body, avail);
            have_data = true;
        }
        pos = body + size + (size & 1u);
    }
    if (!have_fmt || !have_data) fail(ErrorKind::decode, "missing fmt or data chunk");
    if (channels < 1 || channels > 2) fail(ErrorKind::decode, "unsupported channel count " + std::to_string(channels));
    if (rate <= 0) fail(ErrorKind::decode, "invalid sample rate");
    const bool pcm_ok = format == 1 && (bits == 16 || bits == 24);
    const bool float_ok = format == 3 && bits == 32;
    if (!pcm_ok && !float_ok) {
        fail(ErrorKind::decode, "unsupported encoding (format " + std::to_string(format) + ", " +
                                    std::to_string(bits) + " bits)");
    }
    const int width = bits / 8;
    if (block_align != width * channels) fail(ErrorKind::decode, "inconsistent block alignment");

    const std::size_t frames = data.size() / static_cast<std::size_t>(block_align);
    PcmData pcm;
    pcm.sample_rate = rate;
    pcm.channels = channels;
    pcm.channel_data.assign(static_cast<std::size_t>(channels), std::vector<double>(frames));
    for (std::size_t f = 0; f < frames; ++f) {
        for (int c = 0; c < channels; ++c) {
            const std::size_t at = f * static_cast<std::size_t>(block_align) + static_cast<std::size_t>(c * width);
            double v = 0.0;
            if (format == 3) {
                const std::uint32_t raw = read_u32(data, at);
                float fv;
                std::memcpy(&fv, &raw, sizeof fv);
                if (!std::isfinite(fv)) fail(ErrorKind::decode, "non-finite float sample");
                v = fv;
            } else if (bits == 16) {
                v = static_cast<std::int16_t>(read_u16(data, at)) / 32768.0;
            } else {
                std::int32_t s = data[at] | (data[at + 1] << 8) | (data[at + 2] << 16);
                if (s & 0x800000) s -= 0x1000000;
                v = s / 8388608.0;
            }
            pcm.channel_data[static_cast<std::size_t>(c)][f] = v;
        }
    }
    return pcm;
}

std::vector<std::uint8_t> encode_wav(const PcmData& pcm, int bits) {
    require(bits == 16 || bits == 24 || bits == 32, ErrorKind::parameter, "bits must be 16, 24 or 32");
    require(pcm.channels >= 1 && static_cast<int>(pcm.channel_data.size()) == pcm.channels, ErrorKind::parameter,
            "channel data does not match channel count");
    const std::size_t frames = pcm.channel_data[0].size();
    const int width = bits / 8;
    const auto data_size = static_cast<std::uint32_t>(frames * static_cast<std::size_t>(width * pcm.channels));
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, bits == 32 ? 3 : 1);
    put_u16(out, static_cast<std::uint16_t>(pcm.channels));
    put_u32(out, static_cast<std::uint32_t>(pcm.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(pcm.sample_rate * width * pcm.channels));
    put_u16(out, static_cast<std::uint16_t>(width * pcm.channels));
    put_u16(out, static_cast<std::uint16_t>(bits));
    put_tag(out, "data");
    put_u32(out, data_size);
    for (std::size_t f = 0; f < frames; ++f) {
        for (const auto& ch : pcm.channel_data) {
            const double v = std::clamp(ch[f], -1.0, 1.0);
            if (bits == 32) {
                const float fv = static_cast<float>(v);
                std::uint32_t raw;
                std::memcpy(&raw, &fv, sizeof raw);
                put_u32(out, raw);
            } else if (bits == 16) {
                const auto s = static_cast<std::int16_t>(std::lround(std::clamp(v * 32768.0, -32768.0, 32767.0)));
                put_u16(out, static_cast<std::uint16_t>(s));
            } else {
                const auto s = static_cast<std::int32_t>(std::lround(std::clamp(v * 8388608.0, -8388608.0, 8388607.0)));
                out.push_back(static_cast<std::uint8_t>(s & 0xFF));
                out.push_back(static_cast<std::uint8_t>((s >> 8) & 0xFF));
                out.push_back(static_cast<std::uint8_t>((s >> 16) & 0xFF));
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_wav(std::span<const double> signal, int sample_rate, bool float32) {
    PcmData pcm;
    pcm.sample_rate = sample_rate;
    pcm.channels = 1;
    pcm.channel_data.emplace_back(signal.begin(), signal.end());
    return encode_wav(pcm, float32 ? 32 : 16);
}

void write_wav(const std::filesystem::path& path, std::span<const double> signal, int sample_rate, bool float32) {
    const auto bytes = encode_wav(signal, sample_rate, float32);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::io, "short write to " + path.string());
}

std::vector<double> resample_linear(std::span<const double> input, int from_rate, int to_rate) {
    require(from_rate > 0 && to_rate > 0, ErrorKind::parameter, "sample rates must be positive");
    if (from_rate == to_rate || input.empty()) {
        return {input.begin(), input.end()};
    }
    const auto out_len = static_cast<std::size_t>(
        std::llround(static_cast<double>(input.size()) * to_rate / static_cast<double>(from_rate)));
    std::vector<double> out(out_len);
    const double step = static_cast<double>(from_rate) / to_rate;
    const std::size_t last = input.size() - 1;
    for (std::size_t i = 0; i < out_len; ++i) {
        const double pos = static_cast<double>(i) * step;
        const auto lo = std::min(static_cast<std::size_t>(pos), last);
        const std::size_t hi = std::min(lo + 1, last);
        const double frac = pos - static_cast<double>(lo);
        out[i] = input[lo] + (input[hi] - input[lo]) * frac;
    }
    return out;
}

SampleMeta parse_nsynth_name(const std::string& stem) {
    static const std::regex pattern(R"(^([a-z]+)_([a-z]+)_(\d{3})-(\d{3})-(\d{3})$)");
    SampleMeta meta;
    std::smatch m;
    if (std::regex_match(stem, m, pattern)) {
        const int pitch = std::stoi(m[4].str());
        if (pitch <= 127) {
            meta.family = m[1].str();
            meta.pitch = pitch;
            meta.velocity = std::stoi(m[5].str());
        }
    }
    return meta;
}

AudioSample load_sample(const std::filesystem::path& path, int target_rate) {
    require(target_rate > 0, ErrorKind::parameter, "target rate must be positive");
    const auto bytes = read_file(path);
    const PcmData pcm = decode_wav(bytes);
    const std::size_t frames = pcm.channel_data[0].size();
    if (frames == 0) fail(ErrorKind::empty_input, path.string() + " contains no samples");

    std::vector<double> mono(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (const auto& ch : pcm.channel_data) {
            acc += ch[f];
        }
        mono[f] = acc / pcm.channels;
    }
    AudioSample sample;
    sample.id = path.stem().string();
    sample.signal = resample_linear(mono, pcm.sample_rate, target_rate);
    sample.sample_rate = target_rate;
    peak_normalize(sample.signal);
    sample.meta = parse_nsynth_name(sample.id);
    sample.meta.source_path = path.string();
    return sample;
}

ScanResult scan_library(const std::filesystem::path& dir, const MetaFilter& filter, int target_rate) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) fail(ErrorKind::io, dir.string() + " is not a directory");

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".wav") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    // Filename metadata is enough to filter before decoding.
    std::erase_if(files, [&](const fs::path& p) { return !filter.matches(parse_nsynth_name(p.stem().string())); });

    std::vector<std::optional<AudioSample>> loaded(files.size());
    const auto n = static_cast<std::int64_t>(files.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            loaded[static_cast<std::size_t>(i)] = load_sample(files[static_cast<std::size_t>(i)], target_rate);
        } catch (const Error&) {
            // counted below
        }
    }

    ScanResult result;
    for (auto& s : loaded) {
        if (s) {
            result.set.samples.push_back(std::move(*s));
        } else {
            ++result.skipped;
        }
    }
    if (result.set.samples.empty()) fail(ErrorKind::empty_set, "no decodable samples under " + dir.string());
    std::sort(result.set.samples.begin(), result.set.samples.end(),
              [](const AudioSample& a, const AudioSample& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < result.set.samples.size(); ++i) {
        if (result.set.samples[i].id == result.set.samples[i - 1].id) {
            fail(ErrorKind::parameter, "duplicate sample id " + result.set.samples[i].id);
        }
    }
    return result;
}

AudioSample synth_sample(const SynthSpec& spec, int sample_rate, std::string id) {
    require(sample_rate > 0, ErrorKind::parameter, "sample rate must be positive");
    require(spec.duration > 0.0, ErrorKind::parameter, "duration must be positive");
    require(spec.fundamental > 0.0 && spec.n_harmonics >= 1, ErrorKind::parameter,
            "need a positive fundamental and at least one harmonic");
    require(spec.attack >= 0.0 && spec.decay >= 0.0 && spec.am_rate >= 0.0, ErrorKind::parameter,
            "rates and times must be nonnegative");
    require(spec.attack + spec.decay <= spec.duration, ErrorKind::parameter, "attack + decay exceeds duration");
    require(spec.am_depth >= 0.0 && spec.am_depth <= 1.0 && spec.noise_mix >= 0.0 && spec.noise_mix <= 1.0,
            ErrorKind::parameter, "mix parameters must lie in [0, 1]");
    if (spec.fundamental * spec.n_harmonics > sample_rate / 2.0) {
        fail(ErrorKind::aliasing, "highest partial exceeds Nyquist");
    }

    const auto n = static_cast<std::size_t>(std::llround(spec.duration * sample_rate));
    std::vector<double> amps(static_cast<std::size_t>(spec.n_harmonics));
    double amp_sum = 0.0;
    for (int k = 1; k <= spec.n_harmonics; ++k) {
        amps[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -spec.harmonic_rolloff);
        amp_sum += amps[static_cast<std::size_t>(k - 1)];
    }

    Rng rng(spec.seed);
    std::vector<double> signal(n);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        double tone = 0.0;
        for (int k = 1; k <= spec.n_harmonics; ++k) {
            tone += amps[static_cast<std::size_t>(k - 1)] * std::sin(two_pi * k * spec.fundamental * t);
        }
        tone /= amp_sum;
        const double noise = rng.uniform(-1.0, 1.0);
        const double mix = (1.0 - spec.noise_mix) * tone + spec.noise_mix * noise;

        double env = 1.0;
        if (spec.attack > 0.0 && t < spec.attack) {
            env = t / spec.attack;
        } else if (spec.decay > 0.0) {
            env = std::exp(-(t - spec.attack) / spec.decay);
        }
        const double am = 1.0 - spec.am_depth * 0.5 * (1.0 - std::cos(two_pi * spec.am_rate * t));
        signal[i] = mix * env * am;
    }
    peak_normalize(signal);

    AudioSample sample;
    sample.id = std::move(id);
    sample.signal = std::move(signal);
    sample.sample_rate = sample_rate;
    sample.meta = parse_nsynth_name(sample.id);
    return sample;
}

SampleSet synthetic_library(std::size_t count, std::uint64_t seed, double duration, int sample_rate) {
    // E4 (MIDI 64), matching the single-pitch subset the browser is built around.
    constexpr double kE4 = 329.6275569128699;
    struct Archetype {
        const char* family;
        int harmonics;
        double rolloff;
        double attack;
        double decay;
        double am_rate;
        double am_depth;
        double noise;
    };
    static constexpr std::array<Archetype, 6> kArchetypes{{
        {"keyboard", 16, 1.2, 0.005, 0.6, 0.0, 0.0, 0.0},
        {"guitar", 20, 0.9, 0.003, 0.35, 0.0, 0.0, 0.02},
        {"string", 18, 0.8, 0.45, 2.0, 5.5, 0.15, 0.03},
        {"organ", 10, 0.5, 0.03, 0.0, 0.0, 0.0, 0.0},
        {"synth", 22, 0.4, 0.02, 0.0, 60.0, 0.9, 0.0},
        {"flute", 4, 2.0, 0.12, 0.0, 4.5, 0.2, 0.35},
    }};

    SampleSet set;
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const Archetype& a = kArchetypes[i % kArchetypes.size()];
        SynthSpec spec;
        spec.fundamental = kE4;
        spec.duration = duration;
        spec.n_harmonics = std::max(1, std::min(a.harmonics, static_cast<int>(sample_rate / 2.0 / kE4)));
        spec.harmonic_rolloff = a.rolloff * rng.uniform(0.8, 1.25);
        spec.attack = std::min(a.attack * rng.uniform(0.6, 1.6), duration * 0.4);
        spec.decay = a.decay > 0.0 ? std::min(a.decay * rng.uniform(0.6, 1.6), duration * 0.5) : 0.0;
        spec.am_rate = a.am_rate > 0.0 ? a.am_rate * rng.uniform(0.8, 1.25) : 0.0;
        spec.am_depth = std::min(1.0, a.am_depth * rng.uniform(0.7, 1.1));
        spec.noise_mix = std::min(1.0, a.noise * rng.uniform(0.5, 1.5));
        spec.seed = derive_seed(seed, i);
        char name[64];
        std::snprintf(name, sizeof name, "%s_synthetic_%03zu-064-100", a.family, i);
        set.samples.push_back(synth_sample(spec, sample_rate, name));
    }
    std::sort(set.samples.begin(), set.samples.end(),
              [](const AudioSample& x, const AudioSample& y) { return x.id < y.id; });
    return set;
}

}  // namespace timbremap
