#include "safel/harness/client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace safel::harness {
namespace {

using nlohmann::json;

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

bool timeout_error(httplib::Error err) {
  return err == httplib::Error::ConnectionTimeout ||
         err == httplib::Error::Read || err == httplib::Error::Write;
}

// Accepts the common completion shapes: choices[0].message.content,
// choices[0].text, or a top-level content/output string.
std::string completion_text(const std::string& body) {
  const json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    throw TransportError("endpoint returned unparseable body: " +
                         body.substr(0, 200));
  }
  if (parsed.contains("choices") && parsed["choices"].is_array() &&
      !parsed["choices"].empty()) {
    const json& choice = parsed["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
    if (choice.contains("text") && choice["text"].is_string()) {
      return choice["text"].get<std::string>();
    }
  }
  for (const char* key : {"content", "output"}) {
    if (parsed.contains(key) && parsed[key].is_string()) {
      return parsed[key].get<std::string>();
    }
  }
  throw TransportError("endpoint body lacks a completion field: " +
                       body.substr(0, 200));
}

}  // namespace

ChatClient::ChatClient(EndpointConfig config) : config_(std::move(config)) {
  if (config_.timeout_seconds <= 0 || config_.max_concurrent < 1 ||
      config_.max_attempts < 1) {
    throw std::invalid_argument("endpoint config out of range");
  }
  token_ = config_.auth_token;
  if (token_.empty() && !config_.auth_env.empty()) {
    if (const char* env = std::getenv(config_.auth_env.c_str())) {
      token_ = env;
    }
  }
  if (token_.empty()) {
    throw AuthError("no auth token: set " + config_.auth_env +
                    " or pass an explicit token");
  }

  const size_t scheme = config_.base_url.find("://");
  const size_t path_start = scheme == std::string::npos
                                ? config_.base_url.find('/')
                                : config_.base_url.find('/', scheme + 3);
  if (path_start == std::string::npos) {
    host_ = config_.base_url;
    path_ = "/v1/chat/completions";
  } else {
    host_ = config_.base_url.substr(0, path_start);
    std::string prefix = config_.base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + "/v1/chat/completions";
  }
  if (host_.empty()) {
    throw std::invalid_argument("endpoint base_url is empty");
  }
}

std::string ChatClient::query(const std::string& prompt) const {
  const json request = {
      {"model", config_.model_name},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config_.temperature},
      {"top_p", config_.top_p},
      {"max_tokens", config_.max_tokens},
  };
  const std::string body = request.dump();

  std::string last_error;
  bool timed_out = false;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      const double seconds =
          config_.backoff_base_seconds * static_cast<double>(1 << (attempt - 2));
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }

    httplib::Client http(host_);
    http.set_connection_timeout(config_.timeout_seconds, 0);
    http.set_read_timeout(config_.timeout_seconds, 0);
    http.set_write_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers = {
        {"Authorization", "Bearer " + token_},
    };

    httplib::Result result =
        http.Post(path_, headers, body, "application/json");
    if (!result) {
      timed_out = timeout_error(result.error());
      last_error = "transport failure: " + httplib::to_string(result.error());
      continue;
    }
    timed_out = false;
    if (result->status == 401 || result->status == 403) {
      throw AuthError("endpoint rejected credentials (status " +
                      std::to_string(result->status) + ")");
    }
    if (retryable_status(result->status)) {
      last_error = "status " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw TransportError("status " + std::to_string(result->status) + ": " +
                           result->body.substr(0, 200));
    }
    return completion_text(result->body);
  }

  if (timed_out) {
    throw TimeoutError("no response within " +
                       std::to_string(config_.timeout_seconds) + "s after " +
                       std::to_string(config_.max_attempts) + " attempts");
  }
  throw TransportError("exhausted " + std::to_string(config_.max_attempts) +
                       " attempts; last: " + last_error);
}

}  // namespace safel::harness
