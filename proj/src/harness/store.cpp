#include "safel/harness/store.hpp"

#include <cstdint>
#include <fstream>

namespace safel::harness {
namespace {

using nlohmann::json;

std::string subset_name(pipeline::Subset subset) {
  return subset == pipeline::Subset::MAL ? "mal" : "sit";
}

pipeline::Subset subset_from(const std::string& name) {
  if (name == "mal") return pipeline::Subset::MAL;
  if (name == "sit") return pipeline::Subset::SIT;
  throw StoreError("unknown subset '" + name + "'");
}

}  // namespace

json to_json(const EvalRecord& record) {
  json value = {
      {"scenario_id", record.scenario_id},
      {"test", to_string(record.test)},
      {"model_name", record.model_name},
      {"subset", subset_name(record.subset)},
      {"prompt_hash", record.prompt_hash},
      {"raw_output", record.raw_output},
      {"parsed_result", record.parsed_result},
      {"scores", record.scores},
      {"timestamp", record.timestamp},
  };
  if (record.error) value["error"] = *record.error;
  return value;
}

EvalRecord record_from_json(const json& value) {
  EvalRecord record;
  try {
    record.scenario_id = value.at("scenario_id").get<std::string>();
    const std::string test_name = value.at("test").get<std::string>();
    const std::optional<Test> test = test_from_string(test_name);
    if (!test) throw StoreError("unknown test '" + test_name + "'");
    record.test = *test;
    record.model_name = value.at("model_name").get<std::string>();
    record.subset = subset_from(value.at("subset").get<std::string>());
    record.prompt_hash = value.at("prompt_hash").get<std::string>();
    record.raw_output = value.at("raw_output").get<std::string>();
    record.parsed_result = value.value("parsed_result", json());
    record.scores = value.value("scores", json());
    record.timestamp = value.value("timestamp", std::string());
    if (value.contains("error") && value["error"].is_string()) {
      record.error = value["error"].get<std::string>();
    }
  } catch (const json::exception& err) {
    throw StoreError(std::string("malformed record: ") + err.what());
  }
  return record;
}

std::string fnv1a_hex(const std::string& text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<size_t>(i)] = digits[hash & 0xF];
    hash >>= 4;
  }
  return hex;
}

ResultStore::ResultStore(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;  // first run creates the file on append
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json value = json::parse(line, nullptr, false);
    if (value.is_discarded()) {
      throw StoreError(path_ + ":" + std::to_string(line_no) +
                       ": unparseable record");
    }
    EvalRecord record = record_from_json(value);
    const Key key = key_of(record.scenario_id, record.test, record.model_name);
    if (index_.count(key) > 0) {
      throw StoreError(path_ + ":" + std::to_string(line_no) +
                       ": duplicate record for (" + record.scenario_id + ", " +
                       to_string(record.test) + ", " + record.model_name +
                       ")");
    }
    index_[key] = records_.size();
    records_.push_back(std::move(record));
  }
}

ResultStore::Key ResultStore::key_of(const std::string& scenario_id, Test test,
                                     const std::string& model_name) {
  return {scenario_id, to_string(test), model_name};
}

bool ResultStore::has(const std::string& scenario_id, Test test,
                      const std::string& model_name) const {
  return index_.count(key_of(scenario_id, test, model_name)) > 0;
}

const EvalRecord* ResultStore::find(const std::string& scenario_id, Test test,
                                    const std::string& model_name) const {
  const auto it = index_.find(key_of(scenario_id, test, model_name));
  return it == index_.end() ? nullptr : &records_[it->second];
}

void ResultStore::append(EvalRecord record) {
  const Key key = key_of(record.scenario_id, record.test, record.model_name);
  if (index_.count(key) > 0) {
    throw StoreError("duplicate record for (" + record.scenario_id + ", " +
                     to_string(record.test) + ", " + record.model_name + ")");
  }
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw StoreError("cannot open " + path_ + " for append");
    out << to_json(record).dump() << '\n';
    if (!out) throw StoreError("write to " + path_ + " failed");
  }
  index_[key] = records_.size();
  records_.push_back(std::move(record));
}

}  // namespace safel::harness
