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

#include "timbremap/store.hpp"

#include <iterator>
#include <sstream>

#include "timbremap/error.hpp"

namespace timbremap {

using json = nlohmann::json;

namespace {

std::string questionnaire_key(const QuestionnaireResponse& q) {
    return q.participant_id + "/" + std::to_string(q.pass) + "/" + std::string(to_string(q.questionnaire));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorKind::io, "corrupt log line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            fn(j.at("type").get<std::string>(), j.at("record"));
        } catch (const json::exception& e) {
            fail(ErrorKind::io, "malformed record on log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace

ResultStore::ResultStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        for_each_record(read_file(path_), [&](const std::string& type, const json& rec) {
            if (type == "result") {
                auto r = rec.get<TaskResult>();
                result_keys_.emplace(r.task_id, r.participant_id);
                results_.push_back(std::move(r));
            } else if (type == "questionnaire") {
                auto q = rec.get<QuestionnaireResponse>();
                questionnaire_keys_.insert(questionnaire_key(q));
                questionnaires_.push_back(std::move(q));
            } else if (type == "assignment") {
                slots_[rec.at("participant_id").get<std::string>()] = rec.at("slot").get<std::size_t>();
            }
        });
    } else if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) fail(ErrorKind::io, "cannot open " + path_.string() + " for appending");
}

void ResultStore::write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) fail(ErrorKind::io, "write to " + path_.string() + " failed");
}

void ResultStore::append(const TaskResult& result) {
    const std::string line = json{{"type", "result"}, {"record", result}}.dump();
    std::unique_lock lock(mutex_);
    if (result_keys_.count({result.task_id, result.participant_id})) {
        fail(ErrorKind::conflict, "result for task " + result.task_id + " by " + result.participant_id +
                                      " already recorded");
    }
    write_line(line);
    result_keys_.emplace(result.task_id, result.participant_id);
    results_.push_back(result);
}

void ResultStore::append(const QuestionnaireResponse& response) {
    const std::string line = json{{"type", "questionnaire"}, {"record", response}}.dump();
    const std::string key = questionnaire_key(response);
    std::unique_lock lock(mutex_);
    if (questionnaire_keys_.count(key)) fail(ErrorKind::conflict, "questionnaire " + key + " already recorded");
    write_line(line);
    questionnaire_keys_.insert(key);
    questionnaires_.push_back(response);
}

std::size_t ResultStore::assign_slot(const std::string& participant_id) {
    std::unique_lock lock(mutex_);
    if (auto it = slots_.find(participant_id); it != slots_.end()) return it->second;
    const std::size_t slot = slots_.size();
    write_line(json{{"type", "assignment"}, {"record", {{"participant_id", participant_id}, {"slot", slot}}}}.dump());
    slots_[participant_id] = slot;
    return slot;
}

std::optional<std::size_t> ResultStore::slot_of(const std::string& participant_id) const {
    std::shared_lock lock(mutex_);
    if (auto it = slots_.find(participant_id); it != slots_.end()) return it->second;
    return std::nullopt;
}

std::vector<TaskResult> ResultStore::results(const ResultQuery& query) const {
    std::shared_lock lock(mutex_);
    std::vector<TaskResult> out;
    for (const auto& r : results_) {
        if (query.participant_id && r.participant_id != *query.participant_id) continue;
        if (query.condition && r.condition != query.condition) continue;
        out.push_back(r);
    }
    return out;
}

std::vector<QuestionnaireResponse> ResultStore::questionnaires(const std::optional<std::string>& participant) const {
    std::shared_lock lock(mutex_);
    std::vector<QuestionnaireResponse> out;
    for (const auto& q : questionnaires_) {
        if (!participant || q.participant_id == *participant) out.push_back(q);
    }
    return out;
}

std::string ResultStore::export_jsonl() const {
    std::unique_lock lock(mutex_);
    return read_file(path_);
}

ResultLog parse_result_log(std::string_view text) {
    ResultLog log;
    for_each_record(text, [&](const std::string& type, const json& rec) {
        if (type == "result") log.results.push_back(rec.get<TaskResult>());
        if (type == "questionnaire") log.questionnaires.push_back(rec.get<QuestionnaireResponse>());
    });
    return log;
}

ResultLog read_result_log(const std::filesystem::path& path) { return parse_result_log(read_file(path)); }

}  // namespace timbremap
