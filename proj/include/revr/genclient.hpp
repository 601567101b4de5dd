#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace revr {

// The auth token is read from this environment variable and never from argv.
inline constexpr const char* kAuthTokenEnv = "REVR_API_TOKEN";

struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8000/v1; "/chat/completions" is appended
  std::string model;
  std::string auth_token;
  double timeout_seconds = 120.0;
  int max_retries = 3;
  std::size_t max_concurrency = 4;
  std::chrono::milliseconds initial_backoff{500};

  // Fills auth_token from kAuthTokenEnv when set.
  void load_token_from_env();
};

struct GenerationRequest {
  std::string prompt;
  int n = 1;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::string model;
};

struct GenerationResult {
  std::vector<std::string> completions;
  std::vector<std::string> finish_reasons;
  std::vector<bool> truncated;  // finish_reason == "length"
  std::chrono::milliseconds latency{0};
  int retries = 0;
  bool sequential_fallback = false;
};

enum class GenerationErrorKind { kInvalidRequest, kNetwork, kHttpStatus, kMalformedResponse };

class GenerationError : public std::runtime_error {
 public:
  GenerationError(GenerationErrorKind kind, const std::string& message, int status = 0, std::string excerpt = {})
      : std::runtime_error(message), kind_(kind), status_(status), excerpt_(std::move(excerpt)) {}
  GenerationErrorKind kind() const { return kind_; }
  int status() const { return status_; }
  // First 256 bytes of the offending response body, if any.
  const std::string& excerpt() const { return excerpt_; }

 private:
  GenerationErrorKind kind_;
  int status_;
  std::string excerpt_;
};

inline constexpr std::size_t kExcerptBytes = 256;

// Counting gate that bounds the number of requests in flight.
class ConcurrencyGate {
 public:
  explicit ConcurrencyGate(std::size_t limit);
  void acquire();
  void release();
  std::size_t limit() const { return limit_; }

  class Permit {
   public:
    explicit Permit(ConcurrencyGate& gate) : gate_(gate) { gate_.acquire(); }
    ~Permit() { gate_.release(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    ConcurrencyGate& gate_;
  };

 private:
  std::size_t limit_;
  std::size_t in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

// Anything that can turn a prompt into n completions.
class CompletionSampler {
 public:
  virtual ~CompletionSampler() = default;
  virtual GenerationResult sample(const GenerationRequest& request) = 0;
  virtual std::size_t max_concurrency() const = 0;
};

// Serializes a chat-completions request. Keys are emitted in sorted order so
// identical requests produce identical bytes.
std::string build_request_body(const GenerationRequest& request, bool include_n);

// Client for a chat-completions style endpoint. Thread-safe; one instance
// is meant to be shared by all callers in the process so its gate bounds
// the total number of requests in flight.
class ChatCompletionsClient : public CompletionSampler {
 public:
  explicit ChatCompletionsClient(EndpointConfig config);

  GenerationResult sample(const GenerationRequest& request) override;
  std::size_t max_concurrency() const override { return config_.max_concurrency; }
  const EndpointConfig& config() const { return config_; }

 private:
  struct Response {
    int status = 0;
    std::string body;
  };
  // Retries transport failures, 429 and 5xx with exponential backoff.
  Response post(const std::string& body, int& retries);
  Response post_once(const std::string& body);
  void append_choices(const std::string& body, std::size_t want, GenerationResult& out) const;

  EndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  ConcurrencyGate gate_;
};

}  // namespace revr
