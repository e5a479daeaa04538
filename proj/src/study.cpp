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

#include "timbremap/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

using json = nlohmann::json;

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::practice: return "practice";
        case Phase::familiarization: return "familiarization";
        case Phase::evaluation: return "evaluation";
    }
    return "evaluation";
}

Phase phase_from_string(std::string_view text) {
    if (text == "practice") return Phase::practice;
    if (text == "familiarization") return Phase::familiarization;
    if (text == "evaluation") return Phase::evaluation;
    fail(ErrorKind::parameter, "unknown phase '" + std::string(text) + "'");
}

std::string condition_key(Condition c) {
    return std::string(to_string(c.placement)) + "/" + std::string(to_string(c.label));
}

Point corner_point(const Canvas& canvas, int corner) {
    const double m = canvas.margin / 2.0;
    switch (((corner % 4) + 4) % 4) {
        case top_left: return {m, m};
        case top_right: return {canvas.width - m, m};
        case bottom_right: return {canvas.width - m, canvas.height - m};
        default: return {m, canvas.height - m};
    }
}

TaskSpec make_task(const Library& library, std::size_t k, Phase phase, Condition condition, std::uint64_t seed,
                   std::string task_id, std::string set_name) {
    const std::size_t n = library.size();
    require(n >= kTaskSamples, ErrorKind::parameter,
            "library has " + std::to_string(n) + " samples; a task needs " + std::to_string(kTaskSamples));
    Rng rng(derive_seed(seed, "draw"));
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < kTaskSamples; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<std::string> ids;
    ids.reserve(kTaskSamples);
    for (std::size_t i = 0; i < kTaskSamples; ++i) ids.push_back(library.ids()[pool[i]]);

    TaskSpec task;
    task.target_id = ids[static_cast<std::size_t>(rng.below(kTaskSamples))];
    task.scene = build_scene(library, ids, condition.placement, condition.label, derive_seed(seed, "scene"));
    task.task_id = task_id.empty() ? "t" + std::to_string(seed) : std::move(task_id);
    task.start_corner = static_cast<int>(k % 4);
    task.phase = phase;
    task.set_name = std::move(set_name);
    task.index = k;
    task.seed = seed;
    return task;
}

double trajectory_length(std::span<const TimedPoint> trajectory) {
    double total = 0.0;
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        total += std::hypot(trajectory[i].x - trajectory[i - 1].x, trajectory[i].y - trajectory[i - 1].y);
    }
    return total;
}

namespace {

double segment_distance(Point p, Point q, Point c) {
    const double dx = q.x - p.x, dy = q.y - p.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((c.x - p.x) * dx + (c.y - p.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x + t * dx - c.x, p.y + t * dy - c.y);
}

}  // namespace

HoverCounts count_hovers(std::span<const TimedPoint> trajectory, std::span<const Point> centers, double diameter) {
    HoverCounts counts;
    if (trajectory.empty()) return counts;
    const double r = diameter / 2.0;
    std::vector<bool> inside(centers.size(), false), seen(centers.size(), false);
    auto enter = [&](std::size_t c) {
        ++counts.events;
        if (!seen[c]) {
            seen[c] = true;
            ++counts.unique;
        }
    };
    const Point first{trajectory.front().x, trajectory.front().y};
    for (std::size_t c = 0; c < centers.size(); ++c) {
        inside[c] = distance(first, centers[c]) <= r;
        if (inside[c]) enter(c);
    }
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        const Point p{trajectory[i - 1].x, trajectory[i - 1].y};
        const Point q{trajectory[i].x, trajectory[i].y};
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (!inside[c] && segment_distance(p, q, centers[c]) <= r) enter(c);
            inside[c] = distance(q, centers[c]) <= r;
        }
    }
    return counts;
}

TaskResult validate_result(const TaskResult& result, const TaskSpec& task, double received_at) {
    require(result.task_id == task.task_id, ErrorKind::parameter,
            "result for task '" + result.task_id + "' submitted against task '" + task.task_id + "'");
    require(valid_participant_id(result.participant_id), ErrorKind::parameter, "invalid participant id");
    for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
        const auto& p = result.trajectory[i];
        require(std::isfinite(p.t) && std::isfinite(p.x) && std::isfinite(p.y), ErrorKind::integrity,
                "trajectory contains non-finite values");
        require(i == 0 || p.t >= result.trajectory[i - 1].t, ErrorKind::integrity,
                "trajectory timestamps decrease at sample " + std::to_string(i));
    }
    require(std::isfinite(result.completion_time) && result.completion_time >= 0.0, ErrorKind::integrity,
            "completion time is not a finite nonnegative number");
    if (result.completed) {
        require(result.completion_time > 0.0, ErrorKind::integrity, "completed task with zero completion time");
    }

    const double recomputed = trajectory_length(result.trajectory);
    const double deviation = std::abs(result.distance - recomputed);
    if (deviation > 0.01 * recomputed && deviation > 1e-9) {
        fail(ErrorKind::integrity, "client distance " + std::to_string(result.distance) +
                                       " px disagrees with recomputed " + std::to_string(recomputed) + " px");
    }

    std::vector<Point> centers;
    centers.reserve(task.scene.samples.size());
    for (const auto& s : task.scene.samples) centers.push_back(s.position);
    const HoverCounts hovers = count_hovers(result.trajectory, centers, task.scene.canvas.diameter);

    TaskResult out = result;
    out.distance = recomputed;
    out.hovered_events = hovers.events;
    out.hovered_unique = hovers.unique;
    out.received_at = received_at;
    out.condition = task.condition();
    out.phase = task.phase;
    out.set_name = task.set_name;
    return out;
}

// --- plans ----------------------------------------------------------------

std::size_t StudyPlan::task_count() const {
    std::size_t total = 0;
    for (const auto& s : steps) total += s.tasks.size();
    return total;
}

bool valid_participant_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

StudyPlan make_study_plan(const std::string& participant_id, LabelMode label_mode, const TaskCounts& counts,
                          std::uint64_t master_seed, std::size_t pass) {
    require(valid_participant_id(participant_id), ErrorKind::parameter,
            "participant id must be 1-64 characters of [A-Za-z0-9_-]");
    require(label_mode != LabelMode::baseline, ErrorKind::parameter, "a study pass tests shape, color or texture");
    for (std::size_t c : {counts.b_r, counts.b_dr, counts.l_dr, counts.l_r}) {
        require(c >= 5 && c <= 10, ErrorKind::parameter, "task counts must lie in [5, 10]");
    }

    StudyPlan plan;
    plan.participant_id = participant_id;
    plan.pass = pass;
    plan.label_mode = label_mode;
    plan.master_seed = master_seed;
    const std::uint64_t base = derive_seed(derive_seed(master_seed, participant_id), pass);
    const std::string prefix = participant_id + "-" + std::to_string(pass) + "-";

    auto questionnaire = [](std::string name) {
        PlanStep s;
        s.name = std::move(name);
        s.kind = StepKind::questionnaire;
        return s;
    };
    auto tasks = [&](std::string name, Phase phase, Condition condition, std::size_t count) {
        PlanStep s;
        s.name = std::move(name);
        s.kind = StepKind::tasks;
        s.phase = phase;
        s.condition = condition;
        for (std::size_t k = 0; k < count; ++k) {
            s.tasks.push_back({prefix + s.name + "-" + std::to_string(k), k,
                               derive_seed(base, s.name + "/" + std::to_string(k))});
        }
        return s;
    };

    const auto R = PlacementMode::random, DR = PlacementMode::dr;
    const auto B = LabelMode::baseline, L = label_mode;
    plan.steps.push_back(questionnaire("Q0"));
    plan.steps.push_back(tasks("P", Phase::practice, {R, B}, 1));
    plan.steps.push_back(tasks("B_R", Phase::evaluation, {R, B}, counts.b_r));
    plan.steps.push_back(tasks("B_DR", Phase::familiarization, {DR, B}, counts.b_dr));
    plan.steps.push_back(tasks("L_DR", Phase::familiarization, {DR, L}, counts.l_dr));
    plan.steps.push_back(questionnaire("Q1"));
    plan.steps.push_back(tasks("L_R", Phase::evaluation, {R, L}, counts.l_r));
    plan.steps.push_back(questionnaire("Q2"));
    return plan;
}

std::array<LabelOrder, 6> canonical_label_orders() {
    LabelOrder order = {LabelMode::shape, LabelMode::color, LabelMode::texture};
    std::array<int, 3> rank = {0, 1, 2};
    std::array<LabelOrder, 6> out;
    std::size_t i = 0;
    do {
        out[i++] = {order[rank[0]], order[rank[1]], order[rank[2]]};
    } while (std::next_permutation(rank.begin(), rank.end()));
    return out;
}

std::vector<LabelOrder> order_permutations(std::size_t participants) {
    require(participants >= 1, ErrorKind::parameter, "need at least one participant");
    const auto orders = canonical_label_orders();
    std::vector<LabelOrder> out;
    out.reserve(participants);
    for (std::size_t i = 0; i < participants; ++i) out.push_back(orders[i % orders.size()]);
    return out;
}

// --- questionnaires -------------------------------------------------------

std::string_view to_string(Questionnaire q) {
    switch (q) {
        case Questionnaire::Q0: return "Q0";
        case Questionnaire::Q1: return "Q1";
        case Questionnaire::Q2: return "Q2";
    }
    return "Q0";
}

Questionnaire questionnaire_from_string(std::string_view text) {
    if (text == "Q0") return Questionnaire::Q0;
    if (text == "Q1") return Questionnaire::Q1;
    if (text == "Q2") return Questionnaire::Q2;
    fail(ErrorKind::parameter, "unknown questionnaire '" + std::string(text) + "'");
}

void validate_questionnaire(const QuestionnaireResponse& response) {
    require(valid_participant_id(response.participant_id), ErrorKind::parameter, "invalid participant id");
    if (response.questionnaire == Questionnaire::Q0) return;
    for (const auto& [item, answer] : response.answers) {
        if (std::holds_alternative<std::string>(answer)) continue;
        const bool ok = std::holds_alternative<std::int64_t>(answer) && std::get<std::int64_t>(answer) >= 1 &&
                        std::get<std::int64_t>(answer) <= 5;
        require(ok, ErrorKind::parameter, "Likert item '" + item + "' must be an integer in [1, 5]");
    }
}

// --- JSON -----------------------------------------------------------------

void to_json(json& j, const Condition& c) {
    j = {{"placement_mode", std::string(to_string(c.placement))}, {"label_mode", std::string(to_string(c.label))}};
}

void from_json(const json& j, Condition& c) {
    c.placement = placement_mode_from_string(j.at("placement_mode").get<std::string>());
    c.label = label_mode_from_string(j.at("label_mode").get<std::string>());
}

void to_json(json& j, const TaskResult& r) {
    json traj = json::array();
    for (const auto& p : r.trajectory) traj.push_back({p.t, p.x, p.y});
    j = {{"task_id", r.task_id},
         {"participant_id", r.participant_id},
         {"completion_time", r.completion_time},
         {"hovered_events", r.hovered_events},
         {"hovered_unique", r.hovered_unique},
         {"distance", r.distance},
         {"trajectory", std::move(traj)},
         {"misclicks", r.misclicks},
         {"target_replays", r.target_replays},
         {"completed", r.completed}};
    if (r.received_at) j["received_at"] = *r.received_at;
    if (r.condition) j["condition"] = *r.condition;
    if (r.phase) j["phase"] = std::string(to_string(*r.phase));
    if (!r.set_name.empty()) j["set"] = r.set_name;
}

void from_json(const json& j, TaskResult& r) {
    r = TaskResult{};
    r.task_id = j.at("task_id").get<std::string>();
    r.participant_id = j.at("participant_id").get<std::string>();
    r.completion_time = j.at("completion_time").get<double>();
    r.hovered_events = j.value("hovered_events", std::size_t{0});
    r.hovered_unique = j.value("hovered_unique", std::size_t{0});
    r.distance = j.at("distance").get<double>();
    for (const auto& p : j.at("trajectory")) {
        r.trajectory.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    }
    r.misclicks = j.value("misclicks", std::size_t{0});
    r.target_replays = j.value("target_replays", std::size_t{0});
    r.completed = j.at("completed").get<bool>();
    if (j.contains("received_at")) r.received_at = j["received_at"].get<double>();
    if (j.contains("condition")) r.condition = j["condition"].get<Condition>();
    if (j.contains("phase")) r.phase = phase_from_string(j["phase"].get<std::string>());
    r.set_name = j.value("set", std::string{});
}

void to_json(json& j, const QuestionnaireResponse& q) {
    json answers = json::object();
    for (const auto& [k, v] : q.answers) {
        std::visit([&](const auto& x) { answers[k] = x; }, v);
    }
    j = {{"questionnaire", std::string(to_string(q.questionnaire))},
         {"participant_id", q.participant_id},
         {"pass", q.pass},
         {"answers", std::move(answers)}};
    if (q.label_mode) j["label_mode"] = std::string(to_string(*q.label_mode));
}

void from_json(const json& j, QuestionnaireResponse& q) {
    q = QuestionnaireResponse{};
    q.questionnaire = questionnaire_from_string(j.at("questionnaire").get<std::string>());
    q.participant_id = j.at("participant_id").get<std::string>();
    q.pass = j.value("pass", std::size_t{0});
    if (j.contains("label_mode")) q.label_mode = label_mode_from_string(j["label_mode"].get<std::string>());
    for (const auto& [k, v] : j.at("answers").items()) {
        if (v.is_number_integer()) {
            q.answers[k] = v.get<std::int64_t>();
        } else if (v.is_number()) {
            q.answers[k] = v.get<double>();
        } else if (v.is_string()) {
            q.answers[k] = v.get<std::string>();
        } else {
            fail(ErrorKind::parameter, "answer '" + k + "' must be a number or a string");
        }
    }
}

void to_json(json& j, const StudyPlan& plan) {
    json steps = json::array();
    for (const auto& s : plan.steps) {
        json step = {{"name", s.name}, {"kind", s.kind == StepKind::questionnaire ? "questionnaire" : "tasks"}};
        if (s.kind == StepKind::tasks) {
            step["phase"] = std::string(to_string(s.phase));
            step["condition"] = s.condition;
            json tasks = json::array();
            for (const auto& t : s.tasks) tasks.push_back({{"task_id", t.task_id}, {"index", t.index}, {"seed", t.seed}});
            step["tasks"] = std::move(tasks);
        }
        steps.push_back(std::move(step));
    }
    j = {{"participant_id", plan.participant_id},
         {"pass", plan.pass},
         {"label_mode", std::string(to_string(plan.label_mode))},
         {"steps", std::move(steps)}};
}

json task_to_json(const TaskSpec& task) {
    const Point start = corner_point(task.scene.canvas, task.start_corner);
    return {{"task_id", task.task_id},
            {"scene", json::parse(scene_to_json(task.scene))},
            {"target_id", task.target_id},
            {"start_corner", task.start_corner},
            {"start_point", {{"x", start.x}, {"y", start.y}}},
            {"phase", std::string(to_string(task.phase))},
            {"set", task.set_name},
            {"index", task.index}};
}

}  // namespace timbremap
