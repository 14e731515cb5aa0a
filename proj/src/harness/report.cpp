#include "safel/harness/report.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "safel/eval/sequencing.hpp"
#include "safel/eval/transition.hpp"

namespace safel::harness {
namespace {

using nlohmann::json;

constexpr std::pair<eval::SeqError, const char*> kErrorNames[] = {
    {eval::SeqError::GRAMMAR, "grammar"},
    {eval::SeqError::AFFORDANCE, "affordance"},
    {eval::SeqError::WRONG_TEMPORAL, "wrong_temporal"},
    {eval::SeqError::MISSING_STEP, "missing_step"},
    {eval::SeqError::ADDITIONAL_STEP, "additional_step"},
    {eval::SeqError::UNMET_GOAL, "unmet_goal"},
};

std::optional<eval::SeqError> error_from_string(const std::string& name) {
  for (const auto& [error, _] : kErrorNames) {
    if (name == to_string(error)) return error;
  }
  return std::nullopt;
}

struct Accumulator {
  size_t refusal_total = 0;
  size_t refusal_correct = 0;
  std::vector<double> su, sr_goal;
  std::vector<eval::TMScore> tm;
  std::vector<eval::Outcome> outcomes;
  std::set<std::string> scenario_ids;
  size_t failed = 0;
};

std::optional<double> mean_pct(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const double v : values) sum += v;
  return 100.0 * sum / static_cast<double>(values.size());
}

void fold_record(Accumulator& acc, const EvalRecord& record) {
  if (record.scores.is_null()) {
    ++acc.failed;
    return;
  }
  acc.scenario_ids.insert(record.scenario_id);
  switch (record.test) {
    case Test::REFUSAL:
      ++acc.refusal_total;
      if (record.scores.value("correct", false)) ++acc.refusal_correct;
      break;
    case Test::GOAL:
      if (record.scores.contains("su_recall") &&
          record.scores["su_recall"].is_number()) {
        acc.su.push_back(record.scores["su_recall"].get<double>());
      }
      if (record.scores.contains("sr_recall") &&
          record.scores["sr_recall"].is_number()) {
        acc.sr_goal.push_back(record.scores["sr_recall"].get<double>());
      }
      break;
    case Test::TRANSITION:
      for (const json& action : record.scores.value("actions", json::array())) {
        eval::TMScore score;
        score.action_name = action.value("name", std::string());
        score.action_class = action.value("class", std::string()) == "new"
                                 ? pddl::ActionClass::NEW
                                 : pddl::ActionClass::PRIMITIVE;
        score.pre_score = action.value("pre", 0.0);
        score.eff_score = action.value("eff", 0.0);
        score.combined = action.value("combined", 0.0);
        acc.tm.push_back(std::move(score));
      }
      break;
    case Test::SEQUENCE: {
      eval::Outcome outcome;
      outcome.scenario_id = record.scenario_id;
      outcome.success = record.scores.value("success", false);
      if (record.scores.contains("error") &&
          record.scores["error"].is_string()) {
        outcome.error =
            error_from_string(record.scores["error"].get<std::string>());
      }
      acc.outcomes.push_back(std::move(outcome));
      break;
    }
  }
}

MetricsRow row_from(const std::string& model, const std::string& subset,
                    const Accumulator& acc) {
  MetricsRow row;
  row.model = model;
  row.subset = subset;
  row.scenarios = acc.scenario_ids.size();
  row.failed = acc.failed;
  if (acc.refusal_total > 0) {
    row.refusal_recall = 100.0 * static_cast<double>(acc.refusal_correct) /
                         static_cast<double>(acc.refusal_total);
  }
  row.su_r = mean_pct(acc.su);
  row.sr_r = mean_pct(acc.sr_goal);
  if (!acc.tm.empty()) {
    const eval::TMAggregate agg = eval::aggregate_tm(acc.tm);
    if (agg.ap_s) row.ap_s = 100.0 * *agg.ap_s;
    if (agg.an_s) row.an_s = 100.0 * *agg.an_s;
    if (agg.a_avg) row.a_avg = 100.0 * *agg.a_avg;
  }
  if (!acc.outcomes.empty()) {
    const eval::SeqMetrics metrics = eval::aggregate_seq(acc.outcomes);
    row.sr = metrics.sr;
    row.er = metrics.er;
    for (const auto& [error, name] : kErrorNames) {
      const auto it = metrics.breakdown.find(error);
      row.breakdown[name] = it == metrics.breakdown.end() ? 0.0 : it->second;
    }
  }
  return row;
}

std::string fixed(std::optional<double> value, int decimals) {
  if (!value) return "-";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << *value;
  return out.str();
}

constexpr const char* kColumns[] = {
    "model",        "subset",       "refusal",      "su_r",
    "sr_r",         "ap_s",         "an_s",         "a_avg",
    "sr",           "er",           "grammar",      "affordance",
    "wrong_temporal", "missing_step", "additional_step", "unmet_goal",
    "scenarios",    "failed"};

std::vector<std::string> row_cells(const MetricsRow& row) {
  auto breakdown = [&](const char* key) -> std::optional<double> {
    const auto it = row.breakdown.find(key);
    if (it == row.breakdown.end()) return std::nullopt;
    return it->second;
  };
  return {row.model,
          row.subset,
          fixed(row.refusal_recall, 1),
          fixed(row.su_r, 1),
          fixed(row.sr_r, 1),
          fixed(row.ap_s, 1),
          fixed(row.an_s, 1),
          fixed(row.a_avg, 1),
          fixed(row.sr, 2),
          fixed(row.er, 2),
          fixed(breakdown("grammar"), 2),
          fixed(breakdown("affordance"), 2),
          fixed(breakdown("wrong_temporal"), 2),
          fixed(breakdown("missing_step"), 2),
          fixed(breakdown("additional_step"), 2),
          fixed(breakdown("unmet_goal"), 2),
          std::to_string(row.scenarios),
          std::to_string(row.failed)};
}

std::string render_text(const ReportTable& table) {
  constexpr size_t columns = std::size(kColumns);
  std::vector<size_t> widths(columns);
  for (size_t c = 0; c < columns; ++c) widths[c] = std::string(kColumns[c]).size();
  std::vector<std::vector<std::string>> grid;
  for (const MetricsRow& row : table.rows) {
    grid.push_back(row_cells(row));
    for (size_t c = 0; c < columns; ++c) {
      widths[c] = std::max(widths[c], grid.back()[c].size());
    }
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (size_t c = 0; c < columns; ++c) {
      if (c > 0) out << "  ";
      out << cells[c];
      for (size_t pad = cells[c].size(); pad < widths[c]; ++pad) out << ' ';
    }
    out << '\n';
  };
  emit({kColumns, kColumns + columns});
  for (const auto& cells : grid) emit(cells);
  return out.str();
}

std::string render_csv(const ReportTable& table) {
  std::ostringstream out;
  for (size_t c = 0; c < std::size(kColumns); ++c) {
    if (c > 0) out << ',';
    out << kColumns[c];
  }
  out << '\n';
  for (const MetricsRow& row : table.rows) {
    const std::vector<std::string> cells = row_cells(row);
    for (size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out << ',';
      out << cells[c];
    }
    out << '\n';
  }
  return out.str();
}

json opt_json(std::optional<double> value) {
  return value ? json(*value) : json();
}

std::string render_json(const ReportTable& table) {
  json rows = json::array();
  for (const MetricsRow& row : table.rows) {
    json breakdown = json::object();
    for (const auto& [name, value] : row.breakdown) breakdown[name] = value;
    rows.push_back({{"model", row.model},
                    {"subset", row.subset},
                    {"refusal_recall", opt_json(row.refusal_recall)},
                    {"su_r", opt_json(row.su_r)},
                    {"sr_r", opt_json(row.sr_r)},
                    {"ap_s", opt_json(row.ap_s)},
                    {"an_s", opt_json(row.an_s)},
                    {"a_avg", opt_json(row.a_avg)},
                    {"sr", opt_json(row.sr)},
                    {"er", opt_json(row.er)},
                    {"breakdown", breakdown},
                    {"scenarios", row.scenarios},
                    {"failed", row.failed}});
  }
  return json({{"rows", rows}}).dump(2) + "\n";
}

}  // namespace

std::optional<ReportFormat> format_from_string(const std::string& name) {
  std::string key;
  for (const char c : name) {
    key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (key == "text") return ReportFormat::TEXT;
  if (key == "csv") return ReportFormat::CSV;
  if (key == "json") return ReportFormat::JSON;
  return std::nullopt;
}

ReportTable build_report(const ResultStore& store) {
  if (store.records().empty()) {
    throw EmptyStoreError("no records in " +
                          (store.path().empty() ? "store" : store.path()));
  }
  std::map<std::pair<std::string, std::string>, Accumulator> groups;
  for (const EvalRecord& record : store.records()) {
    const std::string subset =
        record.subset == pipeline::Subset::MAL ? "mal" : "sit";
    fold_record(groups[{record.model_name, subset}], record);
  }
  ReportTable table;
  for (const auto& [key, acc] : groups) {
    table.rows.push_back(row_from(key.first, key.second, acc));
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const MetricsRow& a, const MetricsRow& b) {
              const double sa = a.sr.value_or(-1.0);
              const double sb = b.sr.value_or(-1.0);
              if (sa != sb) return sa > sb;
              if (a.model != b.model) return a.model < b.model;
              return a.subset < b.subset;
            });
  return table;
}

std::string render_report(const ReportTable& table, ReportFormat format) {
  switch (format) {
    case ReportFormat::TEXT:
      return render_text(table);
    case ReportFormat::CSV:
      return render_csv(table);
    case ReportFormat::JSON:
      return render_json(table);
  }
  return {};
}

}  // namespace safel::harness
