#include "revr/genclient.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace revr {

using nlohmann::json;

namespace {

std::string excerpt(const std::string& body) { return body.substr(0, kExcerptBytes); }

bool transient(int status) { return status == 429 || status >= 500; }

}  // namespace

void EndpointConfig::load_token_from_env() {
  if (const char* token = std::getenv(kAuthTokenEnv); token != nullptr) auth_token = token;
}

ConcurrencyGate::ConcurrencyGate(std::size_t limit) : limit_(limit) {
  if (limit == 0) throw std::invalid_argument("concurrency limit must be >= 1");
}

void ConcurrencyGate::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < limit_; });
  ++in_flight_;
}

void ConcurrencyGate::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

std::string build_request_body(const GenerationRequest& request, bool include_n) {
  json body;
  body["model"] = request.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  if (include_n) body["n"] = request.n;
  return body.dump();
}

ChatCompletionsClient::ChatCompletionsClient(EndpointConfig config)
    : config_(std::move(config)), gate_(config_.max_concurrency) {
  const auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw GenerationError(GenerationErrorKind::kInvalidRequest, "endpoint URL needs a scheme: " + config_.base_url);
  }
  const auto path_begin = config_.base_url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.base_url.substr(0, path_begin);
  path_ = path_begin == std::string::npos ? "" : config_.base_url.substr(path_begin);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
  if (config_.max_retries < 0) throw GenerationError(GenerationErrorKind::kInvalidRequest, "max_retries must be >= 0");
}

ChatCompletionsClient::Response ChatCompletionsClient::post_once(const std::string& body) {
  ConcurrencyGate::Permit permit(gate_);
  httplib::Client cli(scheme_host_port_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config_.timeout_seconds));
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!config_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + config_.auth_token);
  auto res = cli.Post(path_, headers, body, "application/json");
  if (!res) {
    throw GenerationError(GenerationErrorKind::kNetwork,
                          "request to " + scheme_host_port_ + path_ + " failed: " + httplib::to_string(res.error()));
  }
  return Response{res->status, res->body};
}

ChatCompletionsClient::Response ChatCompletionsClient::post(const std::string& body, int& retries) {
  for (int attempt = 0;; ++attempt) {
    const bool last = attempt >= config_.max_retries;
    try {
      auto response = post_once(body);
      if (!transient(response.status) || last) return response;
    } catch (const GenerationError&) {
      if (last) throw;
    }
    ++retries;
    std::this_thread::sleep_for(config_.initial_backoff * (1LL << std::min(attempt, 20)));
  }
}

void ChatCompletionsClient::append_choices(const std::string& body, std::size_t want, GenerationResult& out) const {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw GenerationError(GenerationErrorKind::kMalformedResponse, "response is not valid JSON", 200, excerpt(body));
  }
  const auto it = doc.find("choices");
  if (!doc.is_object() || it == doc.end() || !it->is_array() || it->empty()) {
    throw GenerationError(GenerationErrorKind::kMalformedResponse, "response has no choices", 200, excerpt(body));
  }
  for (const auto& choice : *it) {
    if (out.completions.size() >= want) break;
    const auto msg = choice.find("message");
    if (msg == choice.end() || !msg->is_object() || !msg->contains("content") || !(*msg)["content"].is_string()) {
      throw GenerationError(GenerationErrorKind::kMalformedResponse, "choice has no message content", 200, excerpt(body));
    }
    std::string reason;
    if (auto fr = choice.find("finish_reason"); fr != choice.end() && fr->is_string()) reason = fr->get<std::string>();
    out.completions.push_back((*msg)["content"].get<std::string>());
    out.truncated.push_back(reason == "length");
    out.finish_reasons.push_back(std::move(reason));
  }
}

GenerationResult ChatCompletionsClient::sample(const GenerationRequest& request) {
  if (request.n < 1) throw GenerationError(GenerationErrorKind::kInvalidRequest, "n must be >= 1");
  if (!(request.temperature >= 0.0)) throw GenerationError(GenerationErrorKind::kInvalidRequest, "temperature must be >= 0");
  const auto start = std::chrono::steady_clock::now();
  const auto want = static_cast<std::size_t>(request.n);
  GenerationResult out;

  auto fail_status = [](const Response& r) {
    return GenerationError(GenerationErrorKind::kHttpStatus, "endpoint returned status " + std::to_string(r.status),
                           r.status, excerpt(r.body));
  };

  bool batched = false;
  if (request.n > 1) {
    auto r = post(build_request_body(request, true), out.retries);
    if (r.status >= 200 && r.status < 300) {
      append_choices(r.body, want, out);
      batched = true;
    } else if (r.status != 400 && r.status != 422) {
      throw fail_status(r);
    }
  }
  // Servers that reject or ignore `n` are topped up one completion at a time.
  if (!batched || out.completions.size() < want) {
    out.sequential_fallback = request.n > 1;
    GenerationRequest single = request;
    single.n = 1;
    const auto body = build_request_body(single, false);
    while (out.completions.size() < want) {
      auto r = post(body, out.retries);
      if (r.status < 200 || r.status >= 300) throw fail_status(r);
      append_choices(r.body, out.completions.size() + 1, out);
    }
  }
  out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return out;
}

}  // namespace revr
