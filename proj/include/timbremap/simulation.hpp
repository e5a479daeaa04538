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

// Scripted participants for end-to-end checks of the protocol and analysis.
//
// The agent starts at the task's corner and visits labels nearest-first
// until it reaches the target. Completion time is a lognormal reaction time
// plus a listening dwell per label stopped at (labels merely crossed on the
// way do not cost a dwell) plus travel time, optionally scaled for one
// "planted" condition so the analysis has a known effect to find.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "timbremap/random.hpp"
#include "timbremap/study.hpp"

namespace timbremap {

struct AgentTiming {
    double median_reaction = 8.0;  // seconds
    double reaction_sigma = 0.1;   // log-space
    double participant_sigma = 0.05;
    double dwell = 0.25;           // seconds per label stopped at
    double speed = 800.0;          // px / s
};

struct SimulationConfig {
    std::size_t participants = 5;
    LabelMode label = LabelMode::shape;
    TaskCounts counts{10, 10, 10, 10};
    AgentTiming timing;
    std::optional<Condition> planted = Condition{PlacementMode::dr, LabelMode::shape};
    double planted_factor = 0.8;
    std::uint64_t seed = 0;
};

struct SimulatedStudy {
    std::vector<StudyPlan> plans;
    std::vector<TaskResult> results;  // validated, practice included
};

/// Raw (unvalidated) result of one agent run; `time_scale` multiplies the
/// completion time.
TaskResult simulate_task(const TaskSpec& task, const std::string& participant_id, const AgentTiming& timing,
                         double time_scale, Rng& rng);

SimulatedStudy simulate_study(const Library& library, const SimulationConfig& config);

}  // namespace timbremap
