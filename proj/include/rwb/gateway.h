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

// Uniform client for OpenAI-compatible chat-completion and embedding
// endpoints, plus a deterministic offline mock.
//
// Every request is keyed by a SHA-256 digest of (provider name, model id,
// request payload). With a cache directory configured, responses persist as
// {cache_dir}/{provider}/{digest}.json and are never evicted. Concurrent
// requests for the same key share one in-flight call. Network calls respect
// a global cap and a per-provider cap on in-flight requests.
//
// Transient failures (connection errors, HTTP 429, HTTP 5xx) are retried
// with exponential backoff; other 4xx responses raise ConfigError
// immediately.
//
// A Gateway is safe to share between threads.

#ifndef RWB_GATEWAY_H_
#define RWB_GATEWAY_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace rwb {

enum class ProviderKind { kChat, kEmbedding, kMock };

std::string_view ProviderKindName(ProviderKind kind);
std::optional<ProviderKind> ParseProviderKind(std::string_view text);

struct RequestParams {
  double temperature = 0.0;
  int max_tokens = 512;
  std::optional<std::int64_t> seed;
};

struct ProviderProfile {
  std::string name;
  std::string base_url;  // e.g. "http://localhost:8000/v1"
  std::string model_id;
  RequestParams params;
  ProviderKind kind = ProviderKind::kMock;
  // Environment variable holding the bearer token; unset means no header.
  std::string api_key_env;
  int max_in_flight = 4;
  // Vector width produced by the mock embedder.
  int embedding_dim = 64;
};

ProviderProfile ProfileFromJson(const std::string& name,
                                const nlohmann::json& j);
nlohmann::json ProfileToJson(const ProviderProfile& profile);

// Lower-case hex SHA-256.
std::string Sha256Hex(std::string_view data);

// Hex SHA-256 of provider name, model id and payload, newline separated.
std::string CacheKey(const ProviderProfile& profile,
                     const nlohmann::json& payload);

struct HttpResult {
  int status = 0;  // 0 means the request never got a response
  std::string body;
  std::string error;
};

using HeaderList = std::vector<std::pair<std::string, std::string>>;

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResult PostJson(const std::string& url, const std::string& body,
                              const HeaderList& headers,
                              std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed transport; https requires OpenSSL support.
std::shared_ptr<Transport> MakeHttpTransport();

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};
};

struct ProviderUsage {
  std::int64_t network_calls = 0;
  std::int64_t cache_hits = 0;
  std::int64_t retries = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct Embedding {
  std::vector<double> pooled;
  // Per-token vectors when the provider exposes them; empty otherwise.
  std::vector<std::vector<double>> tokens;
};

class Gateway {
 public:
  struct Options {
    std::filesystem::path cache_dir;  // empty disables the on-disk cache
    int max_in_flight = 4;
    RetryPolicy retry;
    std::chrono::milliseconds timeout{60000};
    std::shared_ptr<Transport> transport;  // null selects MakeHttpTransport()
  };

  explicit Gateway(Options options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Completion text for a single user message. Requires a chat or mock
  // profile.
  std::string Chat(const ProviderProfile& profile, std::string_view prompt);

  // One embedding per input text. Requires an embedding or mock profile and
  // a non-empty batch; throws ProviderError on inconsistent dimensions.
  std::vector<Embedding> Embed(const ProviderProfile& profile,
                               const std::vector<std::string>& texts);

  ProviderUsage Usage(const std::string& provider) const;

 private:
  class Semaphore;
  struct Reply {
    nlohmann::json response;
    nlohmann::json usage;
  };

  Reply Fetch(const ProviderProfile& profile, const std::string& endpoint,
              const nlohmann::json& payload);
  Reply CallNetwork(const ProviderProfile& profile,
                    const std::string& endpoint,
                    const nlohmann::json& payload);
  Semaphore& ProviderSlot(const ProviderProfile& profile);
  std::optional<nlohmann::json> ReadCache(const ProviderProfile& profile,
                                          const std::string& key) const;
  void WriteCache(const ProviderProfile& profile, const std::string& key,
                  const nlohmann::json& payload, const Reply& reply) const;
  void Record(const std::string& provider, const ProviderUsage& delta);

  Options options_;
  std::unique_ptr<Semaphore> global_slots_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Semaphore>> provider_slots_;
  std::map<std::string, std::shared_future<Reply>> in_flight_;
  std::map<std::string, ProviderUsage> usage_;
};

// The offline generator behind ProviderKind::kMock. Exposed for tests.
namespace mock {

// Generation prompts yield "Answer: {label}\nExplanation: {3 sentences}"
// where the label cycles over the prompt's answer options by a hash of the
// test-instance block and the sentences get longer, with longer words, as
// the prompted audience level rises. Judge prompts yield deterministic
// error lines or the "NO ERRORS" sentinel.
std::string Complete(std::string_view prompt);

// Unit vector of width `dim` seeded by a hash of `text`; token vectors are
// seeded by each lower-cased word.
Embedding EmbedText(std::string_view text, int dim);

}  // namespace mock

}  // namespace rwb

#endif  // RWB_GATEWAY_H_
