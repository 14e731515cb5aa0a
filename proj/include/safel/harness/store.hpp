#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "safel/harness/prompts.hpp"
#include "safel/pipeline/scenario.hpp"

namespace safel::harness {

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One evaluation result. (scenario_id, test, model_name) is the
// idempotency key; a populated `error` marks a recorded per-record failure
// (transport, parse) that reruns will not retry.
struct EvalRecord {
  std::string scenario_id;
  Test test = Test::REFUSAL;
  std::string model_name;
  pipeline::Subset subset = pipeline::Subset::SIT;
  std::string prompt_hash;  // fnv1a-64 hex of the rendered prompt
  std::string raw_output;
  nlohmann::json parsed_result;  // re-derivable from raw_output
  nlohmann::json scores;
  std::string timestamp;  // ISO-8601 UTC
  std::optional<std::string> error;
};

nlohmann::json to_json(const EvalRecord& record);
EvalRecord record_from_json(const nlohmann::json& value);

// Stable 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

// Append-only newline-delimited record store. Loading replays the file;
// appends flush line-by-line so interrupted runs resume cleanly. An empty
// path keeps the store in memory (tests).
class ResultStore {
 public:
  explicit ResultStore(std::string path = "");

  bool has(const std::string& scenario_id, Test test,
           const std::string& model_name) const;
  const EvalRecord* find(const std::string& scenario_id, Test test,
                         const std::string& model_name) const;
  void append(EvalRecord record);

  const std::vector<EvalRecord>& records() const { return records_; }
  const std::string& path() const { return path_; }

 private:
  using Key = std::tuple<std::string, std::string, std::string>;
  static Key key_of(const std::string& scenario_id, Test test,
                    const std::string& model_name);

  std::string path_;
  std::vector<EvalRecord> records_;
  std::map<Key, size_t> index_;
};

}  // namespace safel::harness
