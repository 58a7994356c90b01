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

#include "rwb/gateway.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "rwb/error.h"

namespace rwb {
namespace {

using nlohmann::json;

constexpr std::string_view kChatEndpoint = "chat/completions";
constexpr std::string_view kEmbeddingEndpoint = "embeddings";

std::string JoinUrl(std::string_view base, std::string_view endpoint) {
  while (!base.empty() && base.back() == '/') base.remove_suffix(1);
  return std::string(base) + "/" + std::string(endpoint);
}

bool Transient(int status) { return status == 0 || status == 429 || status >= 500; }

class HttpTransport : public Transport {
 public:
  HttpResult PostJson(const std::string& url, const std::string& body,
                      const HeaderList& headers,
                      std::chrono::milliseconds timeout) override {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      throw ConfigError("base_url must include a scheme: " + url);
    }
    const std::size_t path_begin = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_begin);
    const std::string path =
        path_begin == std::string::npos ? "/" : url.substr(path_begin);

    httplib::Client client(origin);
    if (!client.is_valid()) throw ConfigError("unsupported URL: " + url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) return {0, "", httplib::to_string(res.error())};
    return {res->status, res->body, ""};
  }
};

}  // namespace

class Gateway::Semaphore {
 public:
  explicit Semaphore(int slots) : free_(std::max(slots, 1)) {}

  void Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return free_ > 0; });
    --free_;
  }

  void Release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
};

namespace {

class SlotGuard {
 public:
  template <typename S>
  explicit SlotGuard(S& s) : release_([&s] { s.Release(); }) {
    s.Acquire();
  }
  ~SlotGuard() { release_(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::function<void()> release_;
};

}  // namespace

std::string_view ProviderKindName(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kChat:
      return "chat";
    case ProviderKind::kEmbedding:
      return "embedding";
    case ProviderKind::kMock:
      return "mock";
  }
  return "";
}

std::optional<ProviderKind> ParseProviderKind(std::string_view text) {
  if (text == "chat") return ProviderKind::kChat;
  if (text == "embedding") return ProviderKind::kEmbedding;
  if (text == "mock") return ProviderKind::kMock;
  return std::nullopt;
}

ProviderProfile ProfileFromJson(const std::string& name, const json& j) {
  ProviderProfile p;
  p.name = name;
  const auto kind = ParseProviderKind(j.value("kind", std::string("mock")));
  if (!kind) throw ConfigError("provider " + name + ": unknown kind");
  p.kind = *kind;
  p.base_url = j.value("base_url", std::string());
  p.model_id = j.value("model", std::string(p.kind == ProviderKind::kMock
                                               ? "mock"
                                               : ""));
  p.api_key_env = j.value("api_key_env", std::string());
  p.max_in_flight = j.value("max_in_flight", 4);
  p.embedding_dim = j.value("embedding_dim", 64);
  p.params.temperature = j.value("temperature", 0.0);
  p.params.max_tokens = j.value("max_tokens", 512);
  if (j.contains("seed") && !j.at("seed").is_null()) {
    p.params.seed = j.at("seed").get<std::int64_t>();
  }
  if (p.kind != ProviderKind::kMock && p.base_url.empty()) {
    throw ConfigError("provider " + name + ": base_url is required");
  }
  if (p.model_id.empty()) throw ConfigError("provider " + name + ": model is required");
  if (p.embedding_dim <= 0) throw ConfigError("provider " + name + ": bad embedding_dim");
  return p;
}

json ProfileToJson(const ProviderProfile& p) {
  json j = {{"kind", ProviderKindName(p.kind)},
            {"base_url", p.base_url},
            {"model", p.model_id},
            {"api_key_env", p.api_key_env},
            {"max_in_flight", p.max_in_flight},
            {"embedding_dim", p.embedding_dim},
            {"temperature", p.params.temperature},
            {"max_tokens", p.params.max_tokens}};
  if (p.params.seed) j["seed"] = *p.params.seed;
  return j;
}

std::string CacheKey(const ProviderProfile& profile, const json& payload) {
  return Sha256Hex(profile.name + "\n" + profile.model_id + "\n" +
                   payload.dump());
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::shared_ptr<Transport> MakeHttpTransport() {
  return std::make_shared<HttpTransport>();
}

Gateway::Gateway(Options options)
    : options_(std::move(options)),
      global_slots_(std::make_unique<Semaphore>(options_.max_in_flight)) {
  if (!options_.transport) options_.transport = MakeHttpTransport();
}

Gateway::~Gateway() = default;

Gateway::Semaphore& Gateway::ProviderSlot(const ProviderProfile& profile) {
  std::lock_guard lock(mu_);
  auto& slot = provider_slots_[profile.name];
  if (!slot) slot = std::make_unique<Semaphore>(profile.max_in_flight);
  return *slot;
}

void Gateway::Record(const std::string& provider, const ProviderUsage& d) {
  std::lock_guard lock(mu_);
  ProviderUsage& u = usage_[provider];
  u.network_calls += d.network_calls;
  u.cache_hits += d.cache_hits;
  u.retries += d.retries;
  u.prompt_tokens += d.prompt_tokens;
  u.completion_tokens += d.completion_tokens;
}

ProviderUsage Gateway::Usage(const std::string& provider) const {
  std::lock_guard lock(mu_);
  const auto it = usage_.find(provider);
  return it == usage_.end() ? ProviderUsage{} : it->second;
}

std::optional<json> Gateway::ReadCache(const ProviderProfile& profile,
                                       const std::string& key) const {
  if (options_.cache_dir.empty()) return std::nullopt;
  const auto path = options_.cache_dir / profile.name / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json entry = json::parse(in);
    if (entry.contains("response")) return entry;
  } catch (const json::exception&) {
    // A torn or foreign file is treated as a miss and rewritten.
  }
  return std::nullopt;
}

void Gateway::WriteCache(const ProviderProfile& profile, const std::string& key,
                         const json& payload, const Reply& reply) const {
  if (options_.cache_dir.empty()) return;
  const auto dir = options_.cache_dir / profile.name;
  std::filesystem::create_directories(dir);
  const json entry = {{"provider", profile.name},
                      {"model", profile.model_id},
                      {"request", payload},
                      {"response", reply.response},
                      {"usage", reply.usage}};
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::this_thread::get_id();
  const auto tmp = dir / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << entry.dump() << "\n";
    if (!out) throw Error("cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / (key + ".json"));
}

Gateway::Reply Gateway::CallNetwork(const ProviderProfile& profile,
                                    const std::string& endpoint,
                                    const json& payload) {
  HeaderList headers = {{"Accept", "application/json"}};
  if (!profile.api_key_env.empty()) {
    if (const char* key = std::getenv(profile.api_key_env.c_str())) {
      headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string url = JoinUrl(profile.base_url, endpoint);
  const std::string body = payload.dump();
  const RetryPolicy& retry = options_.retry;

  HttpResult result;
  for (int attempt = 0;; ++attempt) {
    {
      SlotGuard global(*global_slots_);
      SlotGuard local(ProviderSlot(profile));
      result = options_.transport->PostJson(url, body, headers,
                                            options_.timeout);
    }
    Record(profile.name, {.network_calls = 1});
    if (result.status >= 200 && result.status < 300) break;
    if (!Transient(result.status)) {
      throw ConfigError(profile.name + ": HTTP " +
                        std::to_string(result.status) + " from " + url + ": " +
                        result.body.substr(0, 300));
    }
    if (attempt >= retry.max_retries) {
      const std::string why = result.status == 0
                                  ? result.error
                                  : "HTTP " + std::to_string(result.status);
      throw ProviderError(profile.name + ": " + url + " failed after " +
                          std::to_string(retry.max_retries) +
                          " retries: " + why);
    }
    Record(profile.name, {.retries = 1});
    const double scale = std::pow(retry.multiplier, attempt);
    const auto delay = std::min<std::chrono::milliseconds>(
        retry.max_delay,
        std::chrono::milliseconds(static_cast<std::int64_t>(
            static_cast<double>(retry.base_delay.count()) * scale)));
    std::this_thread::sleep_for(delay);
  }

  Reply reply;
  try {
    reply.response = json::parse(result.body);
  } catch (const json::exception& e) {
    throw ProviderError(profile.name + ": response is not JSON: " + e.what());
  }
  if (const auto u = reply.response.find("usage");
      u != reply.response.end() && u->is_object()) {
    reply.usage = *u;
    Record(profile.name,
           {.prompt_tokens = u->value("prompt_tokens", std::int64_t{0}),
            .completion_tokens = u->value("completion_tokens", std::int64_t{0})});
  }
  return reply;
}

Gateway::Reply Gateway::Fetch(const ProviderProfile& profile,
                              const std::string& endpoint,
                              const json& payload) {
  const std::string key = CacheKey(profile, payload);
  std::promise<Reply> promise;
  std::shared_future<Reply> shared;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    const auto it = in_flight_.find(key);
    if (it != in_flight_.end()) {
      shared = it->second;
    } else {
      shared = promise.get_future().share();
      in_flight_.emplace(key, shared);
      owner = true;
    }
  }
  if (!owner) {
    Reply reply = shared.get();
    Record(profile.name, {.cache_hits = 1});
    return reply;
  }

  auto finish = [&] {
    std::lock_guard lock(mu_);
    in_flight_.erase(key);
  };
  try {
    Reply reply;
    if (auto cached = ReadCache(profile, key)) {
      reply.response = std::move(cached->at("response"));
      reply.usage = cached->value("usage", json::object());
      Record(profile.name, {.cache_hits = 1});
    } else {
      if (profile.kind == ProviderKind::kMock) {
        if (endpoint == kChatEndpoint) {
          const std::string content = mock::Complete(
              payload.at("messages").at(0).at("content").get<std::string>());
          reply.response = {
              {"choices",
               json::array({{{"index", 0},
                             {"message",
                              {{"role", "assistant"}, {"content", content}}}}})}};
        } else {
          json data = json::array();
          const auto& inputs = payload.at("input");
          for (std::size_t i = 0; i < inputs.size(); ++i) {
            const Embedding e = mock::EmbedText(inputs[i].get<std::string>(),
                                                profile.embedding_dim);
            data.push_back({{"index", i},
                            {"embedding", e.pooled},
                            {"token_embeddings", e.tokens}});
          }
          reply.response = {{"data", data}};
        }
      } else {
        reply = CallNetwork(profile, endpoint, payload);
      }
      WriteCache(profile, key, payload, reply);
    }
    promise.set_value(reply);
    finish();
    return reply;
  } catch (...) {
    promise.set_exception(std::current_exception());
    finish();
    throw;
  }
}

std::string Gateway::Chat(const ProviderProfile& profile,
                          std::string_view prompt) {
  if (profile.kind == ProviderKind::kEmbedding) {
    throw ConfigError(profile.name + " is an embedding profile");
  }
  json payload = {
      {"model", profile.model_id},
      {"messages",
       json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
      {"temperature", profile.params.temperature},
      {"max_tokens", profile.params.max_tokens}};
  if (profile.params.seed) payload["seed"] = *profile.params.seed;

  const Reply reply = Fetch(profile, std::string(kChatEndpoint), payload);
  try {
    const auto& content =
        reply.response.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(profile.name + ": malformed chat response: " +
                        e.what());
  }
}

std::vector<Embedding> Gateway::Embed(const ProviderProfile& profile,
                                      const std::vector<std::string>& texts) {
  if (profile.kind == ProviderKind::kChat) {
    throw ConfigError(profile.name + " is a chat profile");
  }
  if (texts.empty()) throw ValidationError("embedding batch is empty");
  const json payload = {{"model", profile.model_id}, {"input", texts}};
  const Reply reply = Fetch(profile, std::string(kEmbeddingEndpoint), payload);

  std::vector<Embedding> out(texts.size());
  try {
    const auto& data = reply.response.at("data");
    if (data.size() != texts.size()) {
      throw ProviderError(profile.name + ": expected " +
                          std::to_string(texts.size()) + " embeddings, got " +
                          std::to_string(data.size()));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t slot = data[i].value("index", i);
      if (slot >= out.size()) throw ProviderError("embedding index out of range");
      out[slot].pooled = data[i].at("embedding").get<std::vector<double>>();
      if (const auto t = data[i].find("token_embeddings");
          t != data[i].end() && t->is_array()) {
        out[slot].tokens = t->get<std::vector<std::vector<double>>>();
      }
    }
  } catch (const json::exception& e) {
    throw ProviderError(profile.name + ": malformed embedding response: " +
                        e.what());
  }
  const std::size_t dim = out.front().pooled.size();
  for (const Embedding& e : out) {
    bool ok = e.pooled.size() == dim && dim > 0;
    for (const auto& t : e.tokens) ok = ok && t.size() == dim;
    if (!ok) throw ProviderError(profile.name + ": embedding dimension mismatch");
  }
  return out;
}

}  // namespace rwb
