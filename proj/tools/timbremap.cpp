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

// timbremap: command-line front end for the browser engine.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>

#include "CLI11.hpp"
#include "json.hpp"
#include "timbremap/audio.hpp"
#include "timbremap/cochlea.hpp"
#include "timbremap/config.hpp"
#include "timbremap/embedding.hpp"
#include "timbremap/error.hpp"
#include "timbremap/labels.hpp"
#include "timbremap/layout.hpp"
#include "timbremap/scene.hpp"
#include "timbremap/service.hpp"
#include "timbremap/simulation.hpp"
#include "timbremap/stats.hpp"
#include "timbremap/store.hpp"
#include "timbremap/texture.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace timbremap;

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::parameter, path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Either a directory scan or a synthetic library.
struct SourceOptions {
    std::string dir;
    std::size_t synthetic = 0;
    std::uint64_t synthetic_seed = 0;
    std::optional<int> pitch;
    std::optional<int> velocity;
    std::optional<std::string> family;
    int rate = kDefaultSampleRate;

    void add(CLI::App* app, bool positional_dir) {
        if (positional_dir) {
            app->add_option("library", dir, "Directory of .wav samples");
        } else {
            app->add_option("--library", dir, "Directory of .wav samples");
        }
        app->add_option("--synthetic", synthetic, "Generate this many synthetic samples instead of scanning");
        app->add_option("--synthetic-seed", synthetic_seed, "Seed of the synthetic library");
        app->add_option("--pitch", pitch, "Keep only this MIDI pitch (NSynth names)");
        app->add_option("--velocity", velocity, "Keep only this velocity");
        app->add_option("--family", family, "Keep only this instrument family");
        app->add_option("--rate", rate, "Analysis sample rate");
    }

    LibrarySource source() const {
        LibrarySource s;
        if (!dir.empty()) s.dir = dir;
        s.filter = {pitch, velocity, family};
        s.synthetic = synthetic;
        s.synthetic_seed = synthetic_seed;
        s.sample_rate = rate;
        if (!s.dir && s.synthetic == 0) fail(ErrorKind::parameter, "give a library directory or --synthetic N");
        return s;
    }
};

json canvas_json(const Canvas& c) {
    return {{"w", c.width}, {"h", c.height}, {"margin", c.margin}, {"diameter", c.diameter}};
}

std::vector<FeatureVector> features_from_json(const json& j) {
    std::vector<FeatureVector> out;
    for (const auto& f : j.at("features")) out.push_back({f.at("id").get<std::string>(), f.at("values").get<std::vector<double>>()});
    return out;
}

// --- subcommands ------------------------------------------------------------

int cmd_scan(const SourceOptions& opt, const std::string& out) {
    const SampleSet set = load_library(opt.source());
    json samples = json::array();
    for (const auto& s : set.samples) {
        json j = {{"id", s.id}, {"duration", s.duration()}, {"sample_rate", s.sample_rate}};
        if (s.meta.pitch) j["pitch"] = *s.meta.pitch;
        if (s.meta.velocity) j["velocity"] = *s.meta.velocity;
        if (s.meta.family) j["family"] = *s.meta.family;
        if (s.meta.source_path) j["path"] = *s.meta.source_path;
        samples.push_back(std::move(j));
    }
    if (!out.empty()) write_json(out, {{"samples", samples}});
    std::cout << set.size() << " samples\n";
    return 0;
}

int cmd_synth(std::size_t count, std::uint64_t seed, const std::string& out) {
    const SampleSet set = synthetic_library(count, seed);
    fs::create_directories(out);
    for (const auto& s : set.samples) write_wav(fs::path(out) / (s.id + ".wav"), s.signal, s.sample_rate);
    std::cout << "wrote " << set.size() << " samples to " << out << "\n";
    return 0;
}

int cmd_features(const SourceOptions& opt, const FeatureConfig& fc, int channels, const std::string& out) {
    const SampleSet set = load_library(opt.source());
    FilterbankConfig fbc;
    fbc.n_channels = channels;
    fbc.sample_rate = opt.rate;
    const Filterbank fb = make_filterbank(fbc);
    const auto profiles = analyze_batch(set.samples, fb);
    std::vector<std::string> ids;
    for (const auto& s : set.samples) ids.push_back(s.id);
    const auto features = concat_features(profiles, ids, fc);

    json jf = json::array(), jd = json::array(), je = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        jf.push_back({{"id", ids[i]}, {"values", features[i].values}});
        const auto d = descriptors(profiles[i], fb);
        jd.push_back({{"id", ids[i]}, {"spectral_centroid", d.spectral_centroid}, {"spectral_flatness", d.spectral_flatness}});
        const auto& p = profiles[i];
        je.push_back({{"id", ids[i]}, {"values", resample_envelope(p.temporal_envelope, p.duration, kShapeRadii)}});
    }
    write_json(out, {{"features", jf}, {"descriptors", jd}, {"temporal_envelopes", je},
                     {"d_pca", fc.d_pca}, {"channels", channels}});
    std::cout << "features for " << ids.size() << " samples -> " << out << "\n";
    return 0;
}

int cmd_embed(const std::string& in, const UmapParams& params, std::uint64_t seed, const std::string& out) {
    const auto features = features_from_json(read_json(in));
    const Embedding2D e = embed(features, params, seed);
    json points = json::array();
    for (std::size_t i = 0; i < e.ids.size(); ++i) points.push_back({{"id", e.ids[i]}, {"x", e.coords[i][0]}, {"y", e.coords[i][1]}});
    write_json(out, {{"seed", seed},
                     {"params", {{"n_neighbors", params.n_neighbors}, {"min_dist", params.min_dist}, {"n_epochs", params.n_epochs}}},
                     {"trustworthiness_k10", features.size() > 20 ? trustworthiness(features, e, 10) : -1.0},
                     {"points", points}});
    std::cout << "embedded " << e.ids.size() << " points -> " << out << "\n";
    return 0;
}

int cmd_place(const std::string& in, const std::string& mode_text, const Canvas& canvas, std::uint64_t seed,
              const std::string& out) {
    canvas.validate();
    const json j = read_json(in);
    Embedding2D e;
    for (const auto& p : j.at("points")) {
        e.ids.push_back(p.at("id").get<std::string>());
        e.coords.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
    }
    const PlacementMode mode = placement_mode_from_string(mode_text);
    OverlapReport report;
    const PlacedSet placed = mode == PlacementMode::dr ? resolve_overlaps(scale_to_canvas(e, canvas), {}, &report)
                                                       : random_placement(e.ids, canvas, seed, {}, &report);
    json positions = json::array();
    for (std::size_t i = 0; i < placed.ids.size(); ++i) {
        positions.push_back({{"id", placed.ids[i]}, {"x", placed.positions[i].x}, {"y", placed.positions[i].y}});
    }
    write_json(out, {{"mode", std::string(to_string(mode))}, {"seed", seed}, {"canvas", canvas_json(canvas)},
                     {"positions", positions}});
    std::cout << "placed " << placed.ids.size() << " labels in " << report.iterations << " relaxation steps -> "
              << out << "\n";
    return 0;
}

int cmd_labels(const std::string& placed_path, const std::string& features_path, const std::string& mode,
               const std::string& exemplars, std::uint64_t seed, const std::string& hue, const std::string& out) {
    const json placed = read_json(placed_path);
    const json feats = read_json(features_path);
    std::vector<std::string> ids;
    std::vector<Point> positions;
    for (const auto& p : placed.at("positions")) {
        ids.push_back(p.at("id").get<std::string>());
        positions.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
    }
    fs::create_directories(out);

    if (mode == "shape") {
        std::map<std::string, std::vector<double>> env;
        for (const auto& e : feats.at("temporal_envelopes")) env[e.at("id")] = e.at("values").get<std::vector<double>>();
        json shapes = json::object();
        for (const auto& id : ids) {
            auto it = env.find(id);
            if (it == env.end()) fail(ErrorKind::not_found, "no temporal envelope for " + id);
            json path = json::array();
            for (const auto& p : shape_label(it->second).polygon) path.push_back({p.x, p.y});
            shapes[id] = std::move(path);
        }
        write_json(fs::path(out) / "shapes.json", {{"winding", "clockwise"}, {"units", "unit, y up"}, {"shapes", shapes}});
    } else if (mode == "color-v1" || mode == "color-v2" || mode == "wheel-v1" || mode == "descriptor-v2") {
        const ColorScheme scheme = color_scheme_from_string(mode);
        std::vector<ColorLabel> colors;
        if (scheme == ColorScheme::wheel_v1) {
            colors = color_wheel_labels(positions);
        } else {
            std::map<std::string, TimbreDescriptors> by_id;
            for (const auto& d : feats.at("descriptors")) {
                by_id[d.at("id")] = {d.at("spectral_centroid").get<double>(), d.at("spectral_flatness").get<double>()};
            }
            std::vector<TimbreDescriptors> selected;
            for (const auto& id : ids) {
                auto it = by_id.find(id);
                if (it == by_id.end()) fail(ErrorKind::not_found, "no descriptors for " + id);
                selected.push_back(it->second);
            }
            const auto calib = calibrate_centroids(selected);
            for (const auto& d : selected) colors.push_back(color_descriptor(d, calib, hue_path_from_string(hue)));
        }
        json out_colors = json::object();
        for (std::size_t i = 0; i < ids.size(); ++i) out_colors[ids[i]] = {colors[i].hue, colors[i].saturation, colors[i].lightness};
        write_json(fs::path(out) / "colors.json", {{"scheme", std::string(to_string(scheme))}, {"hsl", out_colors}});
    } else if (mode == "texture") {
        std::map<std::string, FeatureVector> by_id;
        for (auto& f : features_from_json(feats)) by_id[f.source_id] = f;
        std::vector<FeatureVector> selected;
        for (const auto& id : ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) fail(ErrorKind::not_found, "no features for " + id);
            selected.push_back(it->second);
        }
        const auto medoids = kmedoids(selected, kTextureMedoids, derive_seed(seed, "medoids"));
        std::vector<FeatureVector> medoid_vectors;
        for (std::size_t m : medoids.medoids) medoid_vectors.push_back(selected[m]);
        auto ex = exemplars.empty() ? builtin_exemplars(256, seed) : load_exemplars(exemplars, 256);
        const TextureSynthesizer synth(std::move(ex));
        json weights = json::object();
        std::vector<std::vector<double>> all(selected.size());
        for (std::size_t i = 0; i < selected.size(); ++i) all[i] = texture_weights(selected[i].values, medoid_vectors);
        // Per-sample synthesis is independent; output order is fixed by index.
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(selected.size()); ++i) {
            const auto image = synth.synthesize(all[i], derive_seed(seed, ids[i]));
            write_png(fs::path(out) / (ids[i] + ".png"), image);
        }
        for (std::size_t i = 0; i < ids.size(); ++i) weights[ids[i]] = all[i];
        json exemplar_ids = json::array();
        for (const auto& e : synth.exemplars()) exemplar_ids.push_back(e.id);
        write_json(fs::path(out) / "textures.json",
                   {{"medoids", medoids.medoid_ids}, {"exemplars", exemplar_ids}, {"weights", weights}});
    } else {
        fail(ErrorKind::parameter, "label mode must be shape, color-v1, color-v2 or texture");
    }
    std::cout << mode << " labels for " << ids.size() << " samples -> " << out << "\n";
    return 0;
}

StudyConfig study_config(const std::string& config_path) {
    return config_path.empty() ? StudyConfig{} : load_study_config(config_path);
}

int cmd_serve(const std::string& config_path, const SourceOptions& opt, int port, const std::string& results,
              const std::string& static_dir) {
    StudyConfig c = study_config(config_path);
    if (!opt.dir.empty()) c.source.dir = opt.dir;
    if (opt.synthetic > 0) {
        c.source.dir.reset();
        c.source.synthetic = opt.synthetic;
    }
    if (port >= 0) c.port = port;
    if (!results.empty()) c.results = results;
    if (!static_dir.empty()) c.static_dir = static_dir;

    std::cerr << "building library...\n";
    auto library = Library::build(load_library(c.source), c.library);
    std::cerr << library->size() << " samples analyzed\n";
    auto store = std::make_shared<ResultStore>(c.results);
    StudyService service(library, {c.counts, c.master_seed, c.static_dir}, store);
    service.serve(c.host, c.port, [&](int bound) {
        std::cout << "listening on http://" << c.host << ":" << bound << "\n" << std::flush;
    });
    return 0;
}

int cmd_export(const std::string& config_path, const std::string& results, const std::string& out) {
    fs::path path = results.empty() ? study_config(config_path).results : fs::path(results);
    if (!fs::exists(path)) fail(ErrorKind::io, "no results log at " + path.string());
    std::ifstream in(path, std::ios::binary);
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    parse_result_log(text);  // refuse to export a corrupt log
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text(out, text);
    }
    return 0;
}

int cmd_stats(const std::string& in, const std::string& measure, const std::string& report, std::uint64_t seed,
              std::size_t resamples, double alpha, const std::string& out) {
    const ResultLog log = read_result_log(in);
    if (report == "summary") {
        std::vector<SummaryTable> tables;
        SummaryOptions so;
        so.seed = seed;
        so.resamples = resamples;
        for (Measure m : {Measure::time, Measure::hovered, Measure::distance}) {
            if (measure == "all" || measure == to_string(m)) tables.push_back(group_summary(log.results, m, so));
        }
        if (tables.empty()) measure_from_string(measure);
        std::cout << format_summary(tables);
        if (!out.empty()) write_json(out, {{"summary", summary_to_json(tables)}});
    } else if (report == "significance") {
        SignificanceReport rep = significance_report(log.results, log.questionnaires, alpha);
        if (measure != "all") {
            measure_from_string(measure);
            std::erase_if(rep.rows, [&](const SignificanceRow& r) { return r.measure != measure; });
        }
        std::cout << format_significance(rep);
        if (!out.empty()) write_json(out, {{"significance", significance_to_json(rep)}});
    } else {
        fail(ErrorKind::parameter, "report must be summary or significance");
    }
    return 0;
}

int cmd_simulate(const SourceOptions& opt, SimulationConfig sc, const std::string& out) {
    if (fs::exists(out)) fail(ErrorKind::io, out + " exists; refusing to append simulated results to it");
    LibraryConfig lc;
    lc.filterbank.sample_rate = opt.rate;
    auto library = Library::build(load_library(opt.source()), lc);
    const SimulatedStudy study = simulate_study(*library, sc);
    ResultStore store(out);
    for (const auto& r : study.results) store.append(r);
    std::cout << study.results.size() << " simulated results -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"timbremap: timbre-based audio sample maps and known-item search studies"};
    app.require_subcommand(1);

    SourceOptions scan_src;
    std::string scan_out;
    auto* scan = app.add_subcommand("scan", "List the samples a library directory provides");
    scan_src.add(scan, true);
    scan->add_option("--out", scan_out, "Write the listing as JSON");

    std::size_t synth_count = 40;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic sample library as .wav files");
    synth->add_option("--count", synth_count, "Number of samples");
    synth->add_option("--seed", synth_seed, "Seed");
    synth->add_option("--out", synth_out, "Output directory")->required();

    SourceOptions feat_src;
    FeatureConfig feat_cfg;
    int feat_channels = 42;
    std::string feat_out = "features.json";
    auto* features = app.add_subcommand("features", "Compute timbre profiles and feature vectors");
    feat_src.add(features, true);
    features->add_option("--d-pca", feat_cfg.d_pca, "Principal components per profile");
    features->add_option("--channels", feat_channels, "Filterbank channels");
    features->add_option("--out", feat_out, "Output JSON");

    std::string embed_in, embed_out = "embedding.json";
    UmapParams umap;
    std::uint64_t embed_seed = 0;
    auto* emb = app.add_subcommand("embed", "Embed feature vectors in 2D");
    emb->add_option("features", embed_in, "features.json")->required();
    emb->add_option("--n-neighbors", umap.n_neighbors, "Neighborhood size");
    emb->add_option("--min-dist", umap.min_dist, "Minimum embedded distance");
    emb->add_option("--epochs", umap.n_epochs, "Optimization epochs");
    emb->add_option("--seed", embed_seed, "Seed");
    emb->add_option("--out", embed_out, "Output JSON");

    std::string place_in, place_mode = "dr", place_out = "placed.json";
    Canvas canvas;
    std::uint64_t place_seed = 0;
    auto* place = app.add_subcommand("place", "Place labels on the canvas and remove overlaps");
    place->add_option("embedding", place_in, "embedding.json")->required();
    place->add_option("--mode", place_mode, "dr or random");
    place->add_option("--width", canvas.width, "Canvas width (px)");
    place->add_option("--height", canvas.height, "Canvas height (px)");
    place->add_option("--margin", canvas.margin, "Canvas margin (px)");
    place->add_option("--diameter", canvas.diameter, "Label diameter (px)");
    place->add_option("--seed", place_seed, "Seed for random placement");
    place->add_option("--out", place_out, "Output JSON");

    std::string lab_placed, lab_features, lab_mode, lab_exemplars, lab_out = "assets", lab_hue = "via-green";
    std::uint64_t lab_seed = 0;
    auto* labels = app.add_subcommand("labels", "Generate shape, color or texture labels");
    labels->add_option("placed", lab_placed, "placed.json")->required();
    labels->add_option("features", lab_features, "features.json")->required();
    labels->add_option("--mode", lab_mode, "shape | color-v1 | color-v2 | texture")->required();
    labels->add_option("--exemplars", lab_exemplars, "Directory with eight exemplar PNGs (default: built in)");
    labels->add_option("--hue-path", lab_hue, "via-green or via-magenta (color-v2)");
    labels->add_option("--seed", lab_seed, "Seed");
    labels->add_option("--out", lab_out, "Output directory");

    std::string serve_config, serve_results, serve_static;
    SourceOptions serve_src;
    int serve_port = -1;
    auto* serve = app.add_subcommand("serve", "Run the study server");
    serve->add_option("--config", serve_config, "study.toml");
    serve_src.add(serve, false);
    serve->add_option("--port", serve_port, "Port (0 picks a free one)");
    serve->add_option("--results", serve_results, "Results log (JSON lines)");
    serve->add_option("--static", serve_static, "Directory of browser client files");

    std::string export_config, export_results, export_out;
    auto* exp = app.add_subcommand("export", "Copy the results log");
    exp->add_option("--config", export_config, "study.toml naming the log");
    exp->add_option("--results", export_results, "Results log to read");
    exp->add_option("--out", export_out, "Destination (default: stdout)");

    std::string stats_in, stats_measure = "all", stats_report = "summary", stats_out;
    std::uint64_t stats_seed = 0;
    std::size_t stats_resamples = 2000;
    double stats_alpha = 0.05;
    auto* st = app.add_subcommand("stats", "Summaries and significance tests over a results log");
    st->add_option("results", stats_in, "results.jsonl")->required();
    st->add_option("--measure", stats_measure, "time | hovered | distance | all");
    st->add_option("--report", stats_report, "summary | significance");
    st->add_option("--seed", stats_seed, "Bootstrap seed");
    st->add_option("--resamples", stats_resamples, "Bootstrap resamples");
    st->add_option("--alpha", stats_alpha, "Significance level");
    st->add_option("--out", stats_out, "Write the report as JSON");

    SourceOptions sim_src;
    sim_src.synthetic = 40;
    SimulationConfig sim;
    std::string sim_out = "simulated.jsonl";
    bool sim_no_effect = false;
    auto* simulate = app.add_subcommand("simulate", "Run scripted participants through the study protocol");
    sim_src.add(simulate, false);
    simulate->add_option("--participants", sim.participants, "Simulated participants");
    simulate->add_option("--seed", sim.seed, "Seed");
    simulate->add_option("--factor", sim.planted_factor, "Time factor planted on dr/shape tasks");
    simulate->add_flag("--no-effect", sim_no_effect, "Plant no condition effect");
    simulate->add_option("--out", sim_out, "Results log to create");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*scan) return cmd_scan(scan_src, scan_out);
        if (*synth) return cmd_synth(synth_count, synth_seed, synth_out);
        if (*features) return cmd_features(feat_src, feat_cfg, feat_channels, feat_out);
        if (*emb) return cmd_embed(embed_in, umap, embed_seed, embed_out);
        if (*place) return cmd_place(place_in, place_mode, canvas, place_seed, place_out);
        if (*labels) return cmd_labels(lab_placed, lab_features, lab_mode, lab_exemplars, lab_seed, lab_hue, lab_out);
        if (*serve) return cmd_serve(serve_config, serve_src, serve_port, serve_results, serve_static);
        if (*exp) return cmd_export(export_config, export_results, export_out);
        if (*st) return cmd_stats(stats_in, stats_measure, stats_report, stats_seed, stats_resamples, stats_alpha, stats_out);
        if (*simulate) {
            if (sim_no_effect) sim.planted.reset();
            return cmd_simulate(sim_src, sim, sim_out);
        }
    } catch (const Error& e) {
        std::cerr << "timbremap: " << e.what() << "\n";
        return e.kind() == ErrorKind::parameter ? 2 : 1;
    } catch (const json::exception& e) {
        std::cerr << "timbremap: malformed JSON: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
