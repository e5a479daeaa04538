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

// HTTP front end of a running study. Request handling lives in plain methods
// returning HttpResponse so it can be exercised without sockets; serve()
// binds them to routes.

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "timbremap/error.hpp"
#include "timbremap/scene.hpp"
#include "timbremap/store.hpp"
#include "timbremap/study.hpp"

namespace httplib {
class Server;
}

namespace timbremap {

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ServiceConfig {
    TaskCounts counts;
    std::uint64_t master_seed = 0;
    std::optional<std::filesystem::path> static_dir;  // browser client files, served at /
};

/// Maps library errors to HTTP statuses: parameter 400, not found 404,
/// conflict 409, integrity 422, anything else 500.
int http_status(ErrorKind kind);

class StudyService {
public:
    StudyService(std::shared_ptr<const Library> library, ServiceConfig config, std::shared_ptr<ResultStore> store);
    ~StudyService();

    /// Participants get label orders in the order of their first plan request.
    HttpResponse get_plan(const std::string& participant_id, std::size_t pass);
    HttpResponse get_task(const std::string& task_id);
    HttpResponse get_audio(const std::string& sample_id) const;
    HttpResponse get_texture(const std::string& sample_id) const;
    HttpResponse post_result(const std::string& body, double received_at);
    HttpResponse post_questionnaire(const std::string& body);
    HttpResponse get_export() const;

    /// Blocks serving HTTP until stop(). `on_ready` receives the bound port
    /// (useful with port 0).
    void serve(const std::string& host, int port, const std::function<void(int)>& on_ready = {});
    void stop();

    std::shared_ptr<const TaskSpec> task(const std::string& task_id);
    std::shared_ptr<const StudyPlan> plan(const std::string& participant_id, std::size_t pass);

private:
    struct TaskRef {
        PlanStep step;  // tasks cleared; condition/phase/name only
        PlannedTask planned;
    };

    std::optional<TaskRef> resolve_task(const std::string& task_id);

    std::shared_ptr<const Library> library_;
    ServiceConfig config_;
    std::shared_ptr<ResultStore> store_;

    std::mutex mutex_;
    std::map<std::pair<std::string, std::size_t>, std::shared_ptr<const StudyPlan>> plans_;
    std::map<std::string, TaskRef> task_refs_;
    std::map<std::string, std::shared_ptr<const TaskSpec>> tasks_;

    std::unique_ptr<httplib::Server> server_;
};

}  // namespace timbremap
