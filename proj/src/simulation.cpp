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

#include "timbremap/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "timbremap/error.hpp"

namespace timbremap {

TaskResult simulate_task(const TaskSpec& task, const std::string& participant_id, const AgentTiming& timing,
                         double time_scale, Rng& rng) {
    const auto& samples = task.scene.samples;
    std::vector<bool> visited(samples.size(), false);
    Point cursor = corner_point(task.scene.canvas, task.start_corner);
    std::size_t stops = 0;

    TaskResult r;
    r.task_id = task.task_id;
    r.participant_id = participant_id;
    double t = 0.0;
    r.trajectory.push_back({t, cursor.x, cursor.y});
    for (;;) {
        std::size_t best = samples.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (visited[i]) continue;
            const double d = distance(cursor, samples[i].position);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == samples.size()) break;
        visited[best] = true;
        ++stops;
        cursor = samples[best].position;
        t += best_d / timing.speed;
        r.trajectory.push_back({t, cursor.x, cursor.y});
        t += timing.dwell;
        if (samples[best].id == task.target_id) break;
    }
    r.distance = trajectory_length(r.trajectory);
    std::vector<Point> centers;
    for (const auto& s : samples) centers.push_back(s.position);
    const auto hovers = count_hovers(r.trajectory, centers, task.scene.canvas.diameter);
    r.hovered_events = hovers.events;
    r.hovered_unique = hovers.unique;

    const double reaction = timing.median_reaction * std::exp(timing.reaction_sigma * rng.normal());
    r.completion_time =
        time_scale * (reaction + timing.dwell * static_cast<double>(stops) + r.distance / timing.speed);
    r.completed = true;
    return r;
}

SimulatedStudy simulate_study(const Library& library, const SimulationConfig& config) {
    require(config.participants >= 1, ErrorKind::parameter, "simulation needs at least one participant");
    require(config.planted_factor > 0.0, ErrorKind::parameter, "planted factor must be positive");
    SimulatedStudy out;
    for (std::size_t p = 0; p < config.participants; ++p) {
        char pid[32];
        std::snprintf(pid, sizeof pid, "sim%03zu", p);
        Rng rng(derive_seed(config.seed, pid));
        const double participant_scale = std::exp(config.timing.participant_sigma * rng.normal());
        StudyPlan plan = make_study_plan(pid, config.label, config.counts, config.seed);
        double clock = 0.0;
        for (const auto& step : plan.steps) {
            if (step.kind != StepKind::tasks) continue;
            for (const auto& planned : step.tasks) {
                TaskSpec task = make_task(library, planned.index, step.phase, step.condition, planned.seed,
                                          planned.task_id, step.name);
                double scale = participant_scale;
                if (config.planted && step.condition == *config.planted) scale *= config.planted_factor;
                TaskResult raw = simulate_task(task, pid, config.timing, scale, rng);
                clock += raw.completion_time;
                out.results.push_back(validate_result(raw, task, clock));
            }
        }
        out.plans.push_back(std::move(plan));
    }
    return out;
}

}  // namespace timbremap
