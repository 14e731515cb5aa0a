#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "safel/harness/store.hpp"

namespace safel::harness {

struct EmptyStoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { TEXT, CSV, JSON };
std::optional<ReportFormat> format_from_string(const std::string& name);

// One row per (model, subset). All values are percentages in [0, 100];
// empty optionals mean the metric does not apply (no records of that test,
// or sequencing on a mal row). `breakdown` carries the six error classes.
struct MetricsRow {
  std::string model;
  std::string subset;  // "mal" / "sit"
  std::optional<double> refusal_recall;
  std::optional<double> su_r;
  std::optional<double> sr_r;
  std::optional<double> ap_s;
  std::optional<double> an_s;
  std::optional<double> a_avg;
  std::optional<double> sr;
  std::optional<double> er;
  std::map<std::string, double> breakdown;
  size_t scenarios = 0;  // distinct scenario ids contributing
  size_t failed = 0;     // records excluded for having no answer
};

struct ReportTable {
  std::vector<MetricsRow> rows;  // sorted by SR descending, then name
};

// Pure function of the store contents: aggregates each (model, subset)
// group's scores. Records without scores (transport failures) are excluded
// and tallied in `failed`; malformed-answer records were scored at append
// time and count like any other answer.
ReportTable build_report(const ResultStore& store);

// refusal/goal/transition columns print with one decimal, sr/er and the
// error breakdown with two.
std::string render_report(const ReportTable& table, ReportFormat format);

}  // namespace safel::harness
