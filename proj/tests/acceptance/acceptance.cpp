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

// Acceptance run: one PASS/FAIL line per top-level criterion, exit status 1
// if any fails. Every check is deterministic (fixed seeds).

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "testdata.hpp"
#include "timbremap/audio.hpp"
#include "timbremap/cochlea.hpp"
#include "timbremap/embedding.hpp"
#include "timbremap/labels.hpp"
#include "timbremap/layout.hpp"
#include "timbremap/random.hpp"
#include "timbremap/scene.hpp"
#include "timbremap/simulation.hpp"
#include "timbremap/stats.hpp"
#include "timbremap/study.hpp"
#include "timbremap/texture.hpp"

using namespace timbremap;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects failed sub-checks; the criterion passes when none failed.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        failed_ += !ok;
    }
    void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }
    bool ok() const { return failed_ == 0; }
    std::string detail() const {
        std::string out = notes_;
        for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + std::string("failed: ") + f;
        if (failed_ > failures_.size()) out += "; (" + std::to_string(failed_ - failures_.size()) + " more)";
        return out;
    }

private:
    std::size_t failed_ = 0;
    std::vector<std::string> failures_;
    std::string notes_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// --- shapes ---------------------------------------------------------------

void shape_fidelity(Checks& c) {
    const auto t0 = Clock::now();
    Rng rng(2026);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> env(kShapeRadii);
        for (double& v : env) v = rng.uniform();
        env[rng.below(kShapeRadii)] = 1.0;
        const ShapeLabel s = shape_label(env);
        if (s.polygon.size() != 2 * kShapeRadii) {
            c.expect(false, "polygon size");
            continue;
        }
        for (std::size_t i = 0; i < kShapeRadii; ++i) {
            if (env[i] <= kShapeMinRadius) continue;
            worst = std::max(worst, std::abs(std::hypot(s.polygon[i].x, s.polygon[i].y) - env[i]));
        }
        bool mirror = true;
        for (std::size_t k = 0; k < kShapeRadii; ++k) {
            const Point r = s.polygon[kShapeSteps - k], l = s.polygon[kShapeRadii + k];
            mirror = mirror && l.x == -r.x && l.y == r.y;
        }
        c.expect(mirror, "exact mirror symmetry");
    }
    c.expect(worst <= 1e-9, "radius recovery " + fmt("%.3g", worst));
    const ShapeLabel circle = shape_label(std::vector<double>(kShapeRadii, 0.7));
    double dev = 0.0;
    for (const Point& p : circle.polygon) dev = std::max(dev, std::abs(std::hypot(p.x, p.y) - 0.7));
    c.expect(dev <= 1e-12, "circle");
    const double t = seconds_since(t0);
    c.expect(t < 1.0, "runtime");
    c.note("max radius error " + fmt("%.2g", worst) + ", circle dev " + fmt("%.2g", dev) + ", " + fmt("%.3f s", t));
}

// --- features -------------------------------------------------------------

AudioSample tone(double f0, int harmonics, double am_rate = 0.0, double noise = 0.0) {
    SynthSpec s;
    s.fundamental = f0;
    s.n_harmonics = harmonics;
    s.am_rate = am_rate;
    s.am_depth = am_rate > 0.0 ? 1.0 : 0.0;
    s.noise_mix = noise;
    s.duration = 1.0;
    s.seed = 5;
    return synth_sample(s);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double crossing(const TimbreProfile& p, double level) {
    for (std::size_t i = 0; i < p.temporal_envelope.size(); ++i) {
        if (p.temporal_envelope[i] >= level) return static_cast<double>(i) / p.frame_rate;
    }
    return INFINITY;
}

void feature_oracles(Checks& c) {
    const auto t0 = Clock::now();
    const Filterbank fb = make_filterbank();
    auto desc = [&](const AudioSample& s) { return descriptors(analyze(s, fb), fb); };

    std::vector<double> centroids;
    for (double f0 : {200.0, 400.0, 800.0}) centroids.push_back(desc(tone(f0, 6)).spectral_centroid);
    c.expect(centroids[0] < centroids[1] && centroids[1] < centroids[2], "centroid ordering");

    const double noise = desc(tone(440.0, 1, 0.0, 1.0)).spectral_flatness;
    const double harmonic = desc(tone(220.0, 30)).spectral_flatness;
    const double sine = desc(tone(440.0, 1)).spectral_flatness;
    c.expect(noise > harmonic && harmonic > sine, "flatness ordering");

    const double smooth = mean(analyze(tone(440.0, 1), fb).roughness_envelope);
    const double rough = mean(analyze(tone(440.0, 1, 70.0), fb).roughness_envelope);
    c.expect(rough > 5.0 * smooth, "roughness ratio");

    SynthSpec s;
    s.duration = 2.0;
    s.attack = 0.005;
    const double fast = crossing(analyze(synth_sample(s), fb), 0.9);
    s.attack = 0.5;
    const double slow = crossing(analyze(synth_sample(s), fb), 0.9);
    c.expect(slow - fast >= 0.3, "attack separation");

    const double t = seconds_since(t0);
    c.expect(t < 30.0, "runtime");
    c.note("centroids " + fmt("%.0f", centroids[0]) + "/" + fmt("%.0f", centroids[1]) + "/" + fmt("%.0f Hz", centroids[2]) +
           ", flatness " + fmt("%.3f", noise) + ">" + fmt("%.3f", harmonic) + ">" + fmt("%.2g", sine) +
           ", roughness x" + fmt("%.0f", rough / smooth) + ", attack gap " + fmt("%.3f s", slow - fast) + ", " +
           fmt("%.1f s", t));
}

// --- embedding ------------------------------------------------------------

void embedding_quality(Checks& c) {
    std::size_t good = 0;
    double min_purity = 1.0, min_trust = 1.0;
    UmapParams p;
    p.n_neighbors = 10;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = testdata::gaussian_clusters(4, 20, 8, 10.0, 0.05, 100 + seed);
        const Embedding2D e = embed(data.vectors, p, seed);
        const double purity = testdata::knn_purity(testdata::as_matrix(e), data.cluster, 10);
        const double trust = trustworthiness(data.vectors, e, 10);
        min_purity = std::min(min_purity, purity);
        min_trust = std::min(min_trust, trust);
        good += purity >= 0.8 && trust >= 0.9;
    }
    c.expect(good >= 8, "seeds meeting purity/trust: " + std::to_string(good));

    const auto big = testdata::gaussian_clusters(8, 100, 30, 10.0, 0.2, 7);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto t0 = Clock::now();
    const Embedding2D a = embed(big.vectors, UmapParams{}, 11, Exec::serial);
    const double t = seconds_since(t0);
    const Embedding2D b = embed(big.vectors, UmapParams{}, 11, Exec::serial);
    omp_set_num_threads(saved);
    const Embedding2D par = embed(big.vectors, UmapParams{}, 11, Exec::parallel);
    c.expect(t < 30.0, "800-point runtime");
    c.expect(a.coords == b.coords, "bit-identical repeat");
    c.expect(a.coords == par.coords, "serial == parallel");
    c.note(std::to_string(good) + "/10 seeds ok (min purity " + fmt("%.3f", min_purity) + ", min trust " +
           fmt("%.3f", min_trust) + "), 800 points single-threaded " + fmt("%.1f s", t));
}

// --- overlap --------------------------------------------------------------

void overlap_removal(Checks& c) {
    const Canvas canvas;  // 800 x 800, diameter 64
    std::vector<std::string> ids;
    for (int i = 0; i < 30; ++i) ids.push_back("s" + std::to_string(i));
    std::size_t max_iters = 0, cases = 0;
    auto check = [&](const PlacedSet& out, const OverlapReport& rep) {
        ++cases;
        max_iters = std::max(max_iters, rep.iterations);
        c.expect(rep.converged && rep.iterations <= 1000, "convergence");
        c.expect(count_overlaps(out.positions, canvas.diameter) == 0, "overlaps");
        c.expect(std::all_of(out.positions.begin(), out.positions.end(), [&](Point p) { return canvas.contains(p); }),
                 "bounds");
    };
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        OverlapReport rep;
        const PlacedSet random = random_placement(ids, canvas, seed, {}, &rep);
        check(random, rep);

        // Crowded start: 30 centers in a 200 x 200 box.
        Rng rng(derive_seed(seed, 1));
        PlacedSet crowded;
        crowded.ids = ids;
        crowded.canvas = canvas;
        for (std::size_t i = 0; i < ids.size(); ++i) crowded.positions.push_back({rng.uniform(300.0, 500.0), rng.uniform(300.0, 500.0)});
        OverlapReport rep2;
        const PlacedSet resolved = resolve_overlaps(crowded, {}, &rep2);
        check(resolved, rep2);
    }
    c.note(std::to_string(cases) + " scenes (50 random, 50 crowded), max " + std::to_string(max_iters) + " iterations");
}

// --- labels ---------------------------------------------------------------

void label_pipelines(Checks& c) {
    std::size_t recovered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = testdata::gaussian_clusters(8, 10, 8, 10.0, 0.05, 50 + seed);
        const KMedoidsResult r = kmedoids(data.vectors, 8, seed);
        std::set<std::size_t> clusters;
        for (std::size_t m : r.medoids) clusters.insert(data.cluster[m]);
        recovered += clusters.size() == 8;

        std::vector<FeatureVector> medoids;
        for (std::size_t m : r.medoids) medoids.push_back(data.vectors[m]);
        for (std::size_t i = 0; i < data.vectors.size(); ++i) {
            const auto w = texture_weights(data.vectors[i].values, medoids);
            c.expect(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12, "weights sum to 1");
            const auto slot = std::find(r.medoids.begin(), r.medoids.end(), i);
            if (slot != r.medoids.end()) {
                const auto k = static_cast<std::size_t>(slot - r.medoids.begin());
                // Regularized by (d + 1e-9)^-2, so one-hot holds to ~1e-20 here.
                for (std::size_t j = 0; j < w.size(); ++j) {
                    c.expect(std::abs(w[j] - (j == k ? 1.0 : 0.0)) < 1e-12, "one-hot at medoid");
                }
            }
        }
    }
    c.expect(recovered == 10, "one medoid per cluster");

    const auto exemplars = builtin_exemplars(64);
    const TextureSynthesizer synth(exemplars);
    double worst = 0.0;
    bool histograms = true;
    for (std::size_t m = 0; m < exemplars.size(); ++m) {
        std::vector<double> w(exemplars.size(), 0.0);
        w[m] = 1.0;
        const auto got = magnitude_spectrum(synth.spectral_field(w, 9 + m));
        const auto want = magnitude_spectrum(exemplars[m].image);
        for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
        auto a = synth_texture(w, exemplars, 64, 9 + m).pixels, b = exemplars[m].image.pixels;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        histograms = histograms && a == b;
    }
    c.expect(worst < 1e-6, "one-hot spectrum");
    c.expect(histograms, "one-hot histogram");

    // Calibrated sweeps from rendered tones: brighter -> hue toward red,
    // noisier -> less saturated.
    const Filterbank fb = make_filterbank();
    std::vector<TimbreDescriptors> bright, noisy;
    for (double f0 : {150.0, 250.0, 400.0, 650.0, 1000.0, 1250.0}) bright.push_back(descriptors(analyze(tone(f0, 6), fb), fb));
    for (double mix : {0.0, 0.1, 0.3, 0.6, 1.0}) noisy.push_back(descriptors(analyze(tone(440.0, 1, 0.0, mix), fb), fb));
    std::vector<TimbreDescriptors> all = bright;
    all.insert(all.end(), noisy.begin(), noisy.end());
    const CentroidCalibration calib = calibrate_centroids(all);
    bool hue_mono = true, hue_mono_m = true, sat_mono = true;
    for (std::size_t i = 1; i < bright.size(); ++i) {
        hue_mono = hue_mono && color_descriptor(bright[i], calib).hue < color_descriptor(bright[i - 1], calib).hue;
        hue_mono_m = hue_mono_m && color_descriptor(bright[i], calib, HuePath::via_magenta).hue >
                                       color_descriptor(bright[i - 1], calib, HuePath::via_magenta).hue;
    }
    for (std::size_t i = 1; i < noisy.size(); ++i) {
        sat_mono = sat_mono && color_descriptor(noisy[i], calib).saturation < color_descriptor(noisy[i - 1], calib).saturation;
    }
    c.expect(hue_mono && hue_mono_m, "hue monotone in brightness");
    c.expect(sat_mono, "saturation monotone in noisiness");
    c.note(std::to_string(recovered) + "/10 k-medoid runs recover all 8 clusters, one-hot spectrum error " +
           fmt("%.2g", worst) + " (spectral stage), histogram exact");
}

// --- statistics -----------------------------------------------------------

void statistics(Checks& c) {
    // Every tie-free arrangement of ranks 1..N with N <= 12.
    std::map<std::tuple<std::size_t, std::size_t, double>, double> oracle_p;
    std::size_t arrangements = 0;
    for (std::size_t n = 2; n <= 12; ++n) {
        for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<double> a, b;
            for (std::size_t i = 0; i < n; ++i) (mask & (1u << i) ? a : b).push_back(static_cast<double>(i + 1));
            const auto r = mann_whitney_u(a, b);
            const auto key = std::make_tuple(a.size(), b.size(), r.u_a);
            auto it = oracle_p.find(key);
            if (it == oracle_p.end()) {
                it = oracle_p.emplace(key, oracle::mann_whitney_enumerated_p(a.size(), b.size(), r.u_a)).first;
            }
            c.expect(r.exact && r.p == it->second, "exact p at N=" + std::to_string(n));
            ++arrangements;
        }
    }

    const std::vector<std::vector<double>> same = {{3, 1, 4, 1, 5}, {3, 1, 4, 1, 5}, {3, 1, 4, 1, 5}};
    const auto kw0 = kruskal_wallis(same);
    c.expect(kw0.h == 0.0 && kw0.p == 1.0, "KW identical groups");

    Rng rng(5000);
    std::vector<double> logn(5000);
    for (double& v : logn) v = std::exp(rng.normal());
    const BoxCoxModel m = boxcox_fit(logn);
    c.expect(m.lambda >= -0.15 && m.lambda <= 0.15, "Box-Cox lambda " + fmt("%.4f", m.lambda));

    std::vector<std::vector<double>> groups(3);
    for (std::size_t g = 0; g < 3; ++g) {
        groups[g].assign(logn.begin() + 40 * g, logn.begin() + 40 * (g + 1));
    }
    auto tr = [&](const std::vector<double>& v) {
        std::vector<double> out;
        for (double x : v) out.push_back(boxcox_apply(m, x));
        return out;
    };
    const std::vector<std::vector<double>> tg = {tr(groups[0]), tr(groups[1]), tr(groups[2])};
    const auto u0 = mann_whitney_u(groups[0], groups[1]), u1 = mann_whitney_u(tg[0], tg[1]);
    const auto h0 = kruskal_wallis(groups), h1 = kruskal_wallis(tg);
    c.expect(u0.u_a == u1.u_a && u0.p == u1.p && h0.h == h1.h && h0.p == h1.p, "rank invariance");
    c.note(std::to_string(arrangements) + " arrangements vs enumeration, lambda " + fmt("%.4f", m.lambda));
}

// --- protocol -------------------------------------------------------------

std::shared_ptr<const Library> protocol_library() {
    LibraryConfig config;
    config.texture_size = 64;
    config.umap.n_epochs = 200;
    return Library::build(synthetic_library(40, 11, 1.0), config);
}

void protocol(Checks& c, const Library& lib) {
    std::size_t plans = 0, tasks = 0;
    for (LabelMode label : {LabelMode::shape, LabelMode::color, LabelMode::texture}) {
        for (std::size_t n = 5; n <= 10; ++n) {
            for (std::size_t pass = 0; pass < 3; ++pass) {
                const TaskCounts counts{n, 15 - n, n, std::max<std::size_t>(5, (n + 3) % 11)};
                const StudyPlan plan = make_study_plan("acc", label, counts, 17, pass);
                ++plans;
                bool order = plan.steps.size() == kStepOrder.size();
                for (std::size_t i = 0; order && i < plan.steps.size(); ++i) order = plan.steps[i].name == kStepOrder[i];
                c.expect(order, "step order");
                if (label != LabelMode::shape || pass != 0 || n != 7) continue;
                for (const auto& step : plan.steps) {
                    for (const auto& pt : step.tasks) {
                        const TaskSpec t = make_task(lib, pt.index, step.phase, step.condition, pt.seed, pt.task_id, step.name);
                        ++tasks;
                        c.expect(t.scene.samples.size() == kTaskSamples, "30 samples");
                        c.expect(t.start_corner == static_cast<int>(pt.index % 4), "corner k mod 4");
                    }
                }
            }
        }
    }

    std::vector<std::string> ids(lib.ids().begin(), lib.ids().begin() + 30);
    std::size_t conditions = 0;
    for (PlacementMode p : {PlacementMode::dr, PlacementMode::random}) {
        for (LabelMode l : {LabelMode::baseline, LabelMode::shape, LabelMode::color, LabelMode::texture}) {
            const Scene scene = build_scene(lib, ids, p, l, 3);
            ++conditions;
            const std::string text = scene_to_json(scene);
            c.expect(scene_to_json(scene_from_json(text)) == text, "byte-identical JSON");
            c.expect(count_overlaps([&] {
                         std::vector<Point> pts;
                         for (const auto& s : scene.samples) pts.push_back(s.position);
                         return pts;
                     }(), scene.canvas.diameter) == 0,
                     "scene overlaps");
        }
    }

    // Geometric fixture: three labels on a line, crossed and one re-entered.
    TaskSpec fixture;
    fixture.task_id = "geo";
    fixture.set_name = "B_R";
    fixture.scene.placement_mode = PlacementMode::random;
    for (int i = 0; i < 3; ++i) {
        SceneSample s;
        s.id = "g" + std::to_string(i);
        s.position = {100.0 + 100.0 * i, 100.0};
        fixture.scene.samples.push_back(s);
    }
    fixture.target_id = "g0";
    TaskResult r;
    r.task_id = "geo";
    r.participant_id = "acc";
    r.completed = true;
    r.completion_time = 2.0;
    r.trajectory = {{0.0, 50, 100}, {1.0, 350, 100}, {2.0, 250, 100}};
    r.distance = 400.0;
    const TaskResult v = validate_result(r, fixture, 1.0);
    c.expect(v.distance == 400.0 && v.hovered_events == 4 && v.hovered_unique == 3, "hover fixture");
    r.trajectory = {{0.0, 0, 500}, {1.0, 30, 540}, {2.0, 60, 580}};  // no label touched
    r.distance = 100.0;
    const TaskResult miss = validate_result(r, fixture, 1.0);
    c.expect(miss.distance == 100.0 && miss.hovered_events == 0 && miss.hovered_unique == 0, "miss fixture");
    c.note(std::to_string(plans) + " plan configurations, " + std::to_string(tasks) + " tasks, " +
           std::to_string(conditions) + " conditions, hover fixture 4/3/400");
}

// --- simulation -----------------------------------------------------------

void simulation(Checks& c, const Library& lib) {
    const auto t0 = Clock::now();
    std::size_t flagged = 0, seeds = 0, tasks = 0;
    bool table_ok = true;
    for (std::uint64_t seed = 0; seed < 50; ++seed, ++seeds) {
        SimulationConfig config;
        config.seed = seed;
        const SimulatedStudy study = simulate_study(lib, config);
        tasks = study.results.size();
        const SignificanceReport rep = significance_report(study.results);
        const auto* row = rep.find("time", "mann-whitney", "label=shape");
        flagged += row != nullptr && row->significant;
        if (seed == 0) {
            std::vector<SummaryTable> tables;
            for (Measure m : {Measure::time, Measure::hovered, Measure::distance}) tables.push_back(group_summary(study.results, m));
            for (const auto& t : tables) table_ok = table_ok && t.groups.size() == 4;  // {baseline, shape} x {dr, random}
            const std::string text = format_summary(tables);
            table_ok = table_ok && text.find("baseline") != std::string::npos && text.find("shape") != std::string::npos;
        }
    }
    const double t = seconds_since(t0);
    c.expect(tasks >= 200, "tasks per study");
    c.expect(table_ok, "summary table shape");
    c.expect(flagged * 10 >= seeds * 9, "flag rate");
    c.expect(t < 120.0, "runtime");
    c.note("planted effect flagged in " + std::to_string(flagged) + "/" + std::to_string(seeds) + " seeds, " +
           std::to_string(tasks) + " tasks per study, " + fmt("%.1f s", t));
}

}  // namespace

int main() {
    std::shared_ptr<const Library> lib;
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria = {
        {"shape fidelity", shape_fidelity},
        {"feature oracles", feature_oracles},
        {"embedding quality", embedding_quality},
        {"overlap removal", overlap_removal},
        {"label pipelines", label_pipelines},
        {"statistics", statistics},
        {"protocol conformance", [&](Checks& c) {
             lib = protocol_library();
             protocol(c, *lib);
         }},
        {"simulation sanity", [&](Checks& c) {
             if (!lib) lib = protocol_library();
             simulation(c, *lib);
         }},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Checks c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok() ? "PASS" : "FAIL") << "  " << name << ": " << c.detail() << std::endl;
        failures += !c.ok();
    }
    return failures == 0 ? 0 : 1;
}
