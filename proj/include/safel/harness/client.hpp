#pragma once

#include <stdexcept>
#include <string>

namespace safel::harness {

// Auth token not resolvable, or the endpoint rejected it (401/403).
struct AuthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Connection/read/write failure or non-retryable status, after the retry
// budget is spent.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Connection or read deadline exceeded on every attempt.
struct TimeoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EndpointConfig {
  std::string base_url;    // scheme://host[:port][/prefix]
  std::string model_name;
  std::string auth_env = "SAFEL_API_TOKEN";  // consulted when token empty
  std::string auth_token;                    // explicit override
  int timeout_seconds = 120;
  int max_concurrent = 1;
  int max_attempts = 3;
  double backoff_base_seconds = 0.5;  // doubles per retry
  double temperature = 0.7;
  double top_p = 0.9;
  int max_tokens = 16384;
};

// Chat-completion client: POSTs one user message, returns the completion
// text. Each query() builds its own connection, so concurrent calls from
// the runner's worker pool are safe.
class ChatClient {
 public:
  // Resolves the auth token (explicit value, then environment); throws
  // AuthError before any network traffic when neither is set.
  explicit ChatClient(EndpointConfig config);

  // Retries 429/5xx and transport failures with exponential backoff.
  std::string query(const std::string& prompt) const;

  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  std::string token_;
  std::string host_;  // scheme://host:port
  std::string path_;  // prefix + /v1/chat/completions
};

}  // namespace safel::harness
