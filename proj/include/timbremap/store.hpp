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

// Append-only JSON-lines store for task results, questionnaire responses
// and participant order assignments.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "timbremap/study.hpp"

namespace timbremap {

struct ResultQuery {
    std::optional<std::string> participant_id;
    std::optional<Condition> condition;
};

/// Every record is one line {"type": ..., "record": {...}}. Appends are
/// serialized and flushed line by line; reads see only completed records.
class ResultStore {
public:
    /// Opens (creating if needed) and replays an existing log.
    explicit ResultStore(std::filesystem::path path);

    const std::filesystem::path& path() const { return path_; }

    /// Throws Error(conflict) if (task_id, participant_id) is already stored.
    void append(const TaskResult& result);
    /// One response per (participant, pass, questionnaire).
    void append(const QuestionnaireResponse& response);

    /// Records the order slot of a participant; returns the existing slot
    /// when one is already stored.
    std::size_t assign_slot(const std::string& participant_id);
    std::optional<std::size_t> slot_of(const std::string& participant_id) const;

    /// Results in append order.
    std::vector<TaskResult> results(const ResultQuery& query = {}) const;
    std::vector<QuestionnaireResponse> questionnaires(const std::optional<std::string>& participant = {}) const;

    /// The raw log.
    std::string export_jsonl() const;

private:
    void write_line(const std::string& line);

    std::filesystem::path path_;
    std::ofstream out_;
    mutable std::shared_mutex mutex_;
    std::vector<TaskResult> results_;
    std::vector<QuestionnaireResponse> questionnaires_;
    std::set<std::pair<std::string, std::string>> result_keys_;
    std::set<std::string> questionnaire_keys_;
    std::map<std::string, std::size_t> slots_;
};

/// Parses a log file without opening it for writing.
struct ResultLog {
    std::vector<TaskResult> results;
    std::vector<QuestionnaireResponse> questionnaires;
};
ResultLog read_result_log(const std::filesystem::path& path);
ResultLog parse_result_log(std::string_view text);

}  // namespace timbremap
