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

// JSON API for the annotation frontend.
//
//   GET  /api/tasks                    all tasks, blinded
//   GET  /api/tasks/next?annotator=ID  next unrated task (204 when done)
//   POST /api/annotations              store one Annotation (201)
//   GET  /api/progress?annotator=ID    {"completed", "total", "remaining"}
//   GET  /api/guidelines               Guidelines()
//
// Anything else is served from the static directory when one is set.

#ifndef RWB_SERVICE_H_
#define RWB_SERVICE_H_

#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "rwb/human_eval.h"

namespace rwb {

class AnnotationService {
 public:
  struct Options {
    std::vector<AnnotationTask> tasks;
    std::string annotation_log;  // append-only JSONL
    std::string static_dir;      // optional UI bundle
    std::string host = "127.0.0.1";
    int port = 0;  // 0 picks a free port
  };

  explicit AnnotationService(Options options);
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  // Binds and serves on a background thread. Returns the bound port.
  int Start();
  // Blocks in the calling thread until Stop() is called elsewhere.
  void Run();
  void Stop();

  int port() const { return port_; }
  AnnotationStore& store() { return *store_; }

 private:
  class Impl;
  void Bind();

  Options options_;
  std::unique_ptr<AnnotationStore> store_;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace rwb

#endif  // RWB_SERVICE_H_
