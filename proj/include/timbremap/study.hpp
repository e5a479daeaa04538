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

// Known-item search protocol: tasks, the fixed study progression, recorded
// measures and their server-side revalidation.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "timbremap/scene.hpp"

namespace timbremap {

inline constexpr std::size_t kTaskSamples = 30;

enum class Phase { practice, familiarization, evaluation };

std::string_view to_string(Phase phase);
Phase phase_from_string(std::string_view text);

struct Condition {
    PlacementMode placement = PlacementMode::random;
    LabelMode label = LabelMode::baseline;

    bool operator==(const Condition&) const = default;
    auto operator<=>(const Condition&) const = default;
};

/// "dr/shape" style key.
std::string condition_key(Condition c);

/// Corners clockwise from the top left.
enum Corner : int { top_left = 0, top_right = 1, bottom_right = 2, bottom_left = 3 };

/// Where a trial's cursor starts: `corner` of the usable canvas area.
Point corner_point(const Canvas& canvas, int corner);

struct TaskSpec {
    std::string task_id;
    Scene scene;
    std::string target_id;
    int start_corner = 0;
    Phase phase = Phase::evaluation;
    std::string set_name;  // step name in the plan, e.g. "B_DR"
    std::size_t index = 0; // position within the set
    std::uint64_t seed = 0;

    Condition condition() const { return {scene.placement_mode, scene.label_mode}; }
};

/// Draws 30 library samples without replacement and a target among them,
/// builds their scene under `condition`; start corner = k mod 4.
TaskSpec make_task(const Library& library, std::size_t k, Phase phase, Condition condition, std::uint64_t seed,
                   std::string task_id = {}, std::string set_name = {});

struct TimedPoint {
    double t = 0.0;  // seconds since the task was armed (client clock)
    double x = 0.0;
    double y = 0.0;

    bool operator==(const TimedPoint&) const = default;
};

struct TaskResult {
    std::string task_id;
    std::string participant_id;
    double completion_time = 0.0;
    std::size_t hovered_events = 0;
    std::size_t hovered_unique = 0;
    double distance = 0.0;
    std::vector<TimedPoint> trajectory;
    std::size_t misclicks = 0;
    std::size_t target_replays = 0;
    bool completed = false;

    // Stamped by validate_result.
    std::optional<double> received_at;  // server clock, seconds since epoch
    std::optional<Condition> condition;
    std::optional<Phase> phase;
    std::string set_name;

    bool operator==(const TaskResult&) const = default;
};

double trajectory_length(std::span<const TimedPoint> trajectory);

struct HoverCounts {
    std::size_t events = 0;
    std::size_t unique = 0;
};

/// A label is hovered while the cursor is within diameter/2 of its center.
/// Each trajectory segment is tested against every disc, so a fast pass
/// through a label between two cursor samples still counts as one entry. A
/// trajectory starting inside a disc counts as entering it.
HoverCounts count_hovers(std::span<const TimedPoint> trajectory, std::span<const Point> centers, double diameter);

/// Recomputes distance and hover counts from the trajectory, rejects client
/// distances more than 1% off, stamps condition and receive time. Pure.
TaskResult validate_result(const TaskResult& result, const TaskSpec& task, double received_at);

// --- study plans ----------------------------------------------------------

struct TaskCounts {
    std::size_t b_r = 7;
    std::size_t b_dr = 7;
    std::size_t l_dr = 7;
    std::size_t l_r = 7;
};

enum class StepKind { questionnaire, tasks };

struct PlannedTask {
    std::string task_id;
    std::size_t index = 0;
    std::uint64_t seed = 0;
};

struct PlanStep {
    std::string name;  // Q0, P, B_R, B_DR, L_DR, Q1, L_R, Q2
    StepKind kind = StepKind::tasks;
    Phase phase = Phase::evaluation;
    Condition condition;
    std::vector<PlannedTask> tasks;
};

struct StudyPlan {
    std::string participant_id;
    std::size_t pass = 0;
    LabelMode label_mode = LabelMode::shape;
    std::uint64_t master_seed = 0;
    std::vector<PlanStep> steps;

    std::size_t task_count() const;
};

inline constexpr std::array<std::string_view, 8> kStepOrder = {"Q0", "P", "B_R", "B_DR", "L_DR", "Q1", "L_R", "Q2"};

/// Participant ids are used in task ids and URLs: [A-Za-z0-9_-], 1..64 chars.
bool valid_participant_id(std::string_view id);

StudyPlan make_study_plan(const std::string& participant_id, LabelMode label_mode, const TaskCounts& counts,
                          std::uint64_t master_seed, std::size_t pass = 0);

using LabelOrder = std::array<LabelMode, 3>;

/// The six orders of (shape, color, texture) in lexicographic order of
/// that listing.
std::array<LabelOrder, 6> canonical_label_orders();

/// Participant i gets canonical order i mod 6.
std::vector<LabelOrder> order_permutations(std::size_t participants);

// --- questionnaires -------------------------------------------------------

enum class Questionnaire { Q0, Q1, Q2 };

std::string_view to_string(Questionnaire q);
Questionnaire questionnaire_from_string(std::string_view text);

using Answer = std::variant<std::int64_t, double, std::string>;

/// Q0 holds demographics (any value type). In Q1 and Q2 every numeric
/// answer is a Likert rating and must be an integer in [1, 5].
struct QuestionnaireResponse {
    Questionnaire questionnaire = Questionnaire::Q0;
    std::string participant_id;
    std::size_t pass = 0;
    std::optional<LabelMode> label_mode;  // stamped by the server from the plan
    std::map<std::string, Answer> answers;

    bool operator==(const QuestionnaireResponse&) const = default;
};

void validate_questionnaire(const QuestionnaireResponse& response);

// --- JSON -----------------------------------------------------------------

void to_json(nlohmann::json& j, const Condition& c);
void from_json(const nlohmann::json& j, Condition& c);
void to_json(nlohmann::json& j, const TaskResult& r);
void from_json(const nlohmann::json& j, TaskResult& r);
void to_json(nlohmann::json& j, const QuestionnaireResponse& q);
void from_json(const nlohmann::json& j, QuestionnaireResponse& q);
void to_json(nlohmann::json& j, const StudyPlan& plan);
nlohmann::json task_to_json(const TaskSpec& task);

}  // namespace timbremap
