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

#include "timbremap/service.hpp"

#include <chrono>
#include <fstream>
#include <iterator>

#include "httplib.h"
#include "json.hpp"
#include "timbremap/audio.hpp"
#include "timbremap/error.hpp"

namespace timbremap {

using json = nlohmann::json;

namespace {

constexpr std::size_t kPasses = 3;

HttpResponse json_response(const json& body, int status = 200) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(ErrorKind kind, const std::string& message) {
    return json_response({{"error", message}}, http_status(kind));
}

template <typename Fn>
HttpResponse guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return error_response(e.kind(), e.what());
    } catch (const json::exception& e) {
        return error_response(ErrorKind::parameter, std::string("malformed JSON: ") + e.what());
    }
}

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
}

json label_order_json(const LabelOrder& order) {
    json out = json::array();
    for (auto m : order) out.push_back(std::string(to_string(m)));
    return out;
}

}  // namespace

int http_status(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parameter: return 400;
        case ErrorKind::not_found: return 404;
        case ErrorKind::conflict: return 409;
        case ErrorKind::integrity: return 422;
        default: return 500;
    }
}

StudyService::StudyService(std::shared_ptr<const Library> library, ServiceConfig config,
                           std::shared_ptr<ResultStore> store)
    : library_(std::move(library)), config_(std::move(config)), store_(std::move(store)) {
    require(library_ != nullptr && store_ != nullptr, ErrorKind::parameter, "service needs a library and a store");
}

StudyService::~StudyService() = default;

std::shared_ptr<const StudyPlan> StudyService::plan(const std::string& participant_id, std::size_t pass) {
    require(valid_participant_id(participant_id), ErrorKind::parameter,
            "participant id must be 1-64 characters of [A-Za-z0-9_-]");
    require(pass < kPasses, ErrorKind::parameter, "pass must be 0, 1 or 2");
    {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find({participant_id, pass}); it != plans_.end()) return it->second;
    }
    const std::size_t slot = store_->assign_slot(participant_id);
    const LabelOrder order = canonical_label_orders()[slot % 6];
    auto made = std::make_shared<const StudyPlan>(
        make_study_plan(participant_id, order[pass], config_.counts, config_.master_seed, pass));

    std::lock_guard lock(mutex_);
    auto [it, inserted] = plans_.emplace(std::make_pair(participant_id, pass), made);
    if (inserted) {
        for (const auto& step : made->steps) {
            PlanStep bare = step;
            bare.tasks.clear();
            for (const auto& t : step.tasks) task_refs_.emplace(t.task_id, TaskRef{bare, t});
        }
    }
    return it->second;
}

std::optional<StudyService::TaskRef> StudyService::resolve_task(const std::string& task_id) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = task_refs_.find(task_id); it != task_refs_.end()) return it->second;
    }
    // Task ids read <participant>-<pass>-<set>-<index>. After a restart the
    // plan is regenerated on demand for participants with a stored slot.
    const auto k_pos = task_id.rfind('-');
    if (k_pos == std::string::npos || k_pos == 0) return std::nullopt;
    const auto set_pos = task_id.rfind('-', k_pos - 1);
    if (set_pos == std::string::npos || set_pos == 0) return std::nullopt;
    const auto pass_pos = task_id.rfind('-', set_pos - 1);
    if (pass_pos == std::string::npos) return std::nullopt;
    const std::string participant = task_id.substr(0, pass_pos);
    const std::string pass_text = task_id.substr(pass_pos + 1, set_pos - pass_pos - 1);
    if (pass_text.size() != 1 || pass_text[0] < '0' || pass_text[0] > '2') return std::nullopt;
    if (!valid_participant_id(participant) || !store_->slot_of(participant)) return std::nullopt;
    plan(participant, static_cast<std::size_t>(pass_text[0] - '0'));
    std::lock_guard lock(mutex_);
    if (auto it = task_refs_.find(task_id); it != task_refs_.end()) return it->second;
    return std::nullopt;
}

std::shared_ptr<const TaskSpec> StudyService::task(const std::string& task_id) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = tasks_.find(task_id); it != tasks_.end()) return it->second;
    }
    auto ref = resolve_task(task_id);
    if (!ref) return nullptr;
    auto built = std::make_shared<const TaskSpec>(make_task(*library_, ref->planned.index, ref->step.phase,
                                                            ref->step.condition, ref->planned.seed, task_id,
                                                            ref->step.name));
    std::lock_guard lock(mutex_);
    return tasks_.emplace(task_id, std::move(built)).first->second;
}

HttpResponse StudyService::get_plan(const std::string& participant_id, std::size_t pass) {
    return guarded([&] {
        auto p = plan(participant_id, pass);
        json body = *p;
        const std::size_t slot = *store_->slot_of(participant_id);
        body["slot"] = slot;
        body["label_order"] = label_order_json(canonical_label_orders()[slot % 6]);
        return json_response(body);
    });
}

HttpResponse StudyService::get_task(const std::string& task_id) {
    return guarded([&] {
        auto t = task(task_id);
        if (!t) fail(ErrorKind::not_found, "unknown task " + task_id);
        return json_response(task_to_json(*t));
    });
}

HttpResponse StudyService::get_audio(const std::string& sample_id) const {
    return guarded([&] {
        auto i = library_->index_of(sample_id);
        if (!i) fail(ErrorKind::not_found, "unknown sample " + sample_id);
        const AudioSample& s = library_->samples().samples[*i];
        if (s.meta.source_path && std::filesystem::is_regular_file(*s.meta.source_path)) {
            std::ifstream in(*s.meta.source_path, std::ios::binary);
            std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
            return HttpResponse{200, "audio/wav", std::move(bytes)};
        }
        const auto wav = encode_wav(s.signal, s.sample_rate);
        return HttpResponse{200, "audio/wav", std::string(wav.begin(), wav.end())};
    });
}

HttpResponse StudyService::get_texture(const std::string& sample_id) const {
    return guarded([&] {
        auto i = library_->index_of(sample_id);
        if (!i) fail(ErrorKind::not_found, "unknown sample " + sample_id);
        const auto png = library_->texture_png(*i);
        return HttpResponse{200, "image/png", std::string(png.begin(), png.end())};
    });
}

HttpResponse StudyService::post_result(const std::string& body, double received_at) {
    return guarded([&] {
        TaskResult r = json::parse(body).get<TaskResult>();
        require(valid_participant_id(r.participant_id), ErrorKind::parameter, "invalid participant id");
        require(r.task_id.rfind(r.participant_id + "-", 0) == 0, ErrorKind::parameter,
                "task " + r.task_id + " does not belong to participant " + r.participant_id);
        auto t = task(r.task_id);
        if (!t) fail(ErrorKind::not_found, "unknown task " + r.task_id);
        const TaskResult validated = validate_result(r, *t, received_at);
        store_->append(validated);
        return json_response({{"status", "ok"},
                              {"task_id", validated.task_id},
                              {"distance", validated.distance},
                              {"hovered_events", validated.hovered_events},
                              {"hovered_unique", validated.hovered_unique},
                              {"received_at", *validated.received_at}});
    });
}

HttpResponse StudyService::post_questionnaire(const std::string& body) {
    return guarded([&] {
        QuestionnaireResponse q = json::parse(body).get<QuestionnaireResponse>();
        require(valid_participant_id(q.participant_id), ErrorKind::parameter, "invalid participant id");
        require(q.pass < kPasses, ErrorKind::parameter, "pass must be 0, 1 or 2");
        const auto slot = store_->slot_of(q.participant_id);
        if (!slot) fail(ErrorKind::not_found, "participant " + q.participant_id + " has no study plan");
        q.label_mode = canonical_label_orders()[*slot % 6][q.pass];
        validate_questionnaire(q);
        store_->append(q);
        return json_response({{"status", "ok"}});
    });
}

HttpResponse StudyService::get_export() const {
    return guarded([&] { return HttpResponse{200, "application/x-ndjson", store_->export_jsonl()}; });
}

void StudyService::serve(const std::string& host, int port, const std::function<void(int)>& on_ready) {
    server_ = std::make_unique<httplib::Server>();
    auto& srv = *server_;
    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    srv.Get("/api/plan", [this, send](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("participant")) {
            return send(res, error_response(ErrorKind::parameter, "missing participant parameter"));
        }
        std::size_t pass = 0;
        if (req.has_param("pass")) {
            const auto text = req.get_param_value("pass");
            if (text.size() != 1 || text[0] < '0' || text[0] > '9') {
                return send(res, error_response(ErrorKind::parameter, "pass must be a small integer"));
            }
            pass = static_cast<std::size_t>(text[0] - '0');
        }
        send(res, get_plan(req.get_param_value("participant"), pass));
    });
    srv.Get(R"(/api/task/([A-Za-z0-9_\-]+))",
            [this, send](const httplib::Request& req, httplib::Response& res) { send(res, get_task(req.matches[1])); });
    srv.Get(R"(/api/audio/([^/]+))",
            [this, send](const httplib::Request& req, httplib::Response& res) { send(res, get_audio(req.matches[1])); });
    srv.Get(R"(/api/texture/([^/]+)\.png)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, get_texture(req.matches[1]));
    });
    srv.Post("/api/result", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, post_result(req.body, now_seconds()));
    });
    srv.Post("/api/questionnaire", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, post_questionnaire(req.body));
    });
    srv.Get("/api/export",
            [this, send](const httplib::Request&, httplib::Response& res) { send(res, get_export()); });
    if (config_.static_dir) {
        require(srv.set_mount_point("/", config_.static_dir->string()), ErrorKind::io,
                "cannot serve " + config_.static_dir->string());
    }

    const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
    require(bound > 0, ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
    if (on_ready) on_ready(bound);
    srv.listen_after_bind();
}

void StudyService::stop() {
    if (server_) server_->stop();
}

}  // namespace timbremap
