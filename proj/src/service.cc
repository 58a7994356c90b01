// Copyright 2026 The Rationale Workbench Authors.
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

#include "rwb/service.h"

#include <map>

#include <httplib.h>

#include "rwb/error.h"

namespace rwb {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void SendError(httplib::Response& res, int status, const std::string& message) {
  SendJson(res, status, {{"error", message}});
}

}  // namespace

class AnnotationService::Impl {
 public:
  httplib::Server server;
  std::map<std::string, std::size_t> index_of;  // task_id -> position
};

AnnotationService::AnnotationService(Options options)
    : options_(std::move(options)),
      store_(std::make_unique<AnnotationStore>(options_.annotation_log)),
      impl_(std::make_unique<Impl>()) {
  for (std::size_t i = 0; i < options_.tasks.size(); ++i) {
    if (!impl_->index_of.emplace(options_.tasks[i].task_id, i).second) {
      throw ValidationError("duplicate task id " + options_.tasks[i].task_id);
    }
  }
  httplib::Server& s = impl_->server;
  const auto& tasks = options_.tasks;

  s.Get("/api/tasks", [&tasks](const httplib::Request&, httplib::Response& res) {
    json body = json::array();
    for (const auto& t : tasks) body.push_back(TaskToPublicJson(t));
    SendJson(res, 200, body);
  });

  s.Get("/api/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string annotator = req.get_param_value("annotator");
    if (annotator.empty()) return SendError(res, 400, "missing annotator");
    const auto snap = store_->snapshot();
    for (const auto& t : options_.tasks) {
      if (!snap->latest.count({t.task_id, annotator})) {
        return SendJson(res, 200, TaskToPublicJson(t));
      }
    }
    res.status = 204;
  });

  s.Post("/api/annotations", [this](const httplib::Request& req, httplib::Response& res) {
    Annotation a;
    try {
      a = AnnotationFromJson(json::parse(req.body));
    } catch (const json::exception& e) {
      return SendError(res, 400, std::string("malformed JSON: ") + e.what());
    } catch (const ValidationError& e) {
      return SendError(res, 400, e.what());
    }
    if (!impl_->index_of.count(a.task_id)) {
      return SendError(res, 404, "unknown task " + a.task_id);
    }
    try {
      SendJson(res, 201, AnnotationToJson(store_->Submit(std::move(a))));
    } catch (const Error& e) {
      SendError(res, 500, e.what());
    }
  });

  s.Get("/api/progress", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string annotator = req.get_param_value("annotator");
    if (annotator.empty()) return SendError(res, 400, "missing annotator");
    const auto snap = store_->snapshot();
    std::size_t done = 0;
    for (const auto& t : options_.tasks) done += snap->latest.count({t.task_id, annotator});
    SendJson(res, 200,
             {{"annotator", annotator},
              {"completed", done},
              {"total", options_.tasks.size()},
              {"remaining", options_.tasks.size() - done}});
  });

  s.Get("/api/guidelines", [](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, Guidelines());
  });

  if (!options_.static_dir.empty() && !s.set_mount_point("/", options_.static_dir)) {
    throw ConfigError("static directory does not exist: " + options_.static_dir);
  }
}

AnnotationService::~AnnotationService() { Stop(); }

void AnnotationService::Bind() {
  httplib::Server& s = impl_->server;
  if (options_.port == 0) {
    port_ = s.bind_to_any_port(options_.host);
  } else {
    port_ = s.bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ <= 0) {
    throw ConfigError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
}

int AnnotationService::Start() {
  Bind();
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void AnnotationService::Run() {
  Bind();
  impl_->server.listen_after_bind();
}

void AnnotationService::Stop() {
  if (impl_) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace rwb
