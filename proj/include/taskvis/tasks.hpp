#pragma once
// The task base: eighteen analytic tasks, each with a priority-ordered list of
// appropriate marks, a description, a default ranking scheme and whether the
// task tolerates aggregation.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskvis/error.hpp"

namespace taskvis {

enum class AnalyticTask {
  change_over_time,
  characterize_distribution,
  cluster,
  comparison,
  compute_derived_value,
  correlate,
  determine_range,
  deviation,
  error_range,
  filter,
  find_anomalies,
  find_extremum,
  magnitude,
  part_to_whole,
  retrieve_value,
  sort,
  spatial,
  trend,
};

inline constexpr std::array<AnalyticTask, 18> kAllTasks = {
    AnalyticTask::change_over_time, AnalyticTask::characterize_distribution, AnalyticTask::cluster,
    AnalyticTask::comparison,       AnalyticTask::compute_derived_value,     AnalyticTask::correlate,
    AnalyticTask::determine_range,  AnalyticTask::deviation,                 AnalyticTask::error_range,
    AnalyticTask::filter,           AnalyticTask::find_anomalies,            AnalyticTask::find_extremum,
    AnalyticTask::magnitude,        AnalyticTask::part_to_whole,             AnalyticTask::retrieve_value,
    AnalyticTask::sort,             AnalyticTask::spatial,                   AnalyticTask::trend,
};

inline std::string_view to_string(AnalyticTask t) {
  static constexpr std::array<std::string_view, 18> kNames = {
      "change_over_time", "characterize_distribution", "cluster",       "comparison",     "compute_derived_value",
      "correlate",        "determine_range",           "deviation",     "error_range",    "filter",
      "find_anomalies",   "find_extremum",             "magnitude",     "part_to_whole",  "retrieve_value",
      "sort",             "spatial",                   "trend",
  };
  return kNames[static_cast<std::size_t>(t)];
}

inline std::optional<AnalyticTask> parse_task(std::string_view s) {
  for (AnalyticTask t : kAllTasks) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

// Tasks the enumerator accepts: everything but filter, which is applied to
// the data before enumeration.
inline std::vector<AnalyticTask> enumerable_tasks() {
  std::vector<AnalyticTask> out;
  for (AnalyticTask t : kAllTasks) {
    if (t != AnalyticTask::filter) out.push_back(t);
  }
  return out;
}

enum class Mark { arc, area, bar, boxplot, circle, errorband, errorbar, geoshape, line, point, rect, rule, text, tick };

inline constexpr std::array<Mark, 14> kAllMarks = {Mark::arc,      Mark::area, Mark::bar,   Mark::boxplot, Mark::circle,
                                                   Mark::errorband, Mark::errorbar, Mark::geoshape, Mark::line,
                                                   Mark::point,    Mark::rect, Mark::rule,  Mark::text,    Mark::tick};

inline std::string_view to_string(Mark m) {
  static constexpr std::array<std::string_view, 14> kNames = {"arc",      "area",  "bar",   "boxplot", "circle",
                                                              "errorband", "errorbar", "geoshape", "line",
                                                              "point",    "rect",  "rule",  "text",    "tick"};
  return kNames[static_cast<std::size_t>(m)];
}

inline std::optional<Mark> parse_mark(std::string_view s) {
  for (Mark m : kAllMarks) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

struct MarkSpec {
  Mark base = Mark::bar;
  std::optional<Mark> overlay;

  auto operator<=>(const MarkSpec&) const = default;

  // "bar", or "rect(text)" for a text layer on rect.
  std::string str() const {
    std::string s(to_string(base));
    if (overlay) s += "(" + std::string(to_string(*overlay)) + ")";
    return s;
  }
};

// Layered combinations that can be built from the task base.
inline constexpr std::array<std::pair<Mark, Mark>, 5> kLayeredMarks = {{
    {Mark::rect, Mark::text},
    {Mark::bar, Mark::rule},
    {Mark::point, Mark::rule},
    {Mark::circle, Mark::text},
    {Mark::point, Mark::line},
}};

inline bool is_constructible(const MarkSpec& m) {
  if (!m.overlay) return true;
  return std::any_of(kLayeredMarks.begin(), kLayeredMarks.end(),
                     [&](const auto& p) { return p.first == m.base && p.second == *m.overlay; });
}

inline std::vector<MarkSpec> all_mark_specs() {
  std::vector<MarkSpec> out;
  for (Mark m : kAllMarks) out.push_back({m, std::nullopt});
  for (const auto& [base, over] : kLayeredMarks) out.push_back({base, over});
  return out;
}

inline std::optional<MarkSpec> parse_mark_spec(std::string_view s) {
  MarkSpec spec;
  const auto open = s.find('(');
  if (open == std::string_view::npos) {
    auto m = parse_mark(s);
    if (!m) return std::nullopt;
    spec.base = *m;
    return spec;
  }
  if (s.back() != ')') return std::nullopt;
  auto base = parse_mark(s.substr(0, open));
  auto over = parse_mark(s.substr(open + 1, s.size() - open - 2));
  if (!base || !over || *base == *over) return std::nullopt;
  spec = {*base, *over};
  if (!is_constructible(spec)) return std::nullopt;
  return spec;
}

enum class RankingScheme { complexity, reverse_complexity, interest, task_coverage };

inline std::string_view to_string(RankingScheme s) {
  switch (s) {
    case RankingScheme::complexity: return "complexity";
    case RankingScheme::reverse_complexity: return "reverse_complexity";
    case RankingScheme::interest: return "interest";
    case RankingScheme::task_coverage: return "task_coverage";
  }
  return "complexity";
}

inline std::optional<RankingScheme> parse_scheme(std::string_view s) {
  for (auto r : {RankingScheme::complexity, RankingScheme::reverse_complexity, RankingScheme::interest,
                 RankingScheme::task_coverage}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

struct TaskDescriptor {
  AnalyticTask task = AnalyticTask::sort;
  std::string name;
  std::string description;
  std::vector<MarkSpec> marks;  // priority order, best first
  RankingScheme default_scheme = RankingScheme::complexity;
  bool aggregation_allowed = true;

  bool operator==(const TaskDescriptor&) const = default;
};

// Version 1 of the table; kept byte-compatible with data/tasks.json.
inline constexpr std::string_view kBuiltinTaskTable = R"json({
  "version": 1,
  "tasks": [
    {"id": "change_over_time", "name": "Change Over Time", "marks": ["line", "area"], "description": "Analyse how the data changes over time series", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "characterize_distribution", "name": "Characterize Distribution", "marks": ["bar", "point"], "description": "Characterize the distribution of the data over the set", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "cluster", "name": "Cluster", "marks": ["bar", "point"], "description": "Find clusters of similar attribute values", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "comparison", "name": "Comparison", "marks": ["line", "point", "bar"], "description": "Give emphasis to comparison on different entities", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "compute_derived_value", "name": "Compute Derived Value", "marks": ["rect(text)", "arc", "bar"], "description": "Compute aggregated or binned numeric derived value", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "correlate", "name": "Correlate", "marks": ["bar", "line"], "description": "Determine useful relationships between the columns", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "determine_range", "name": "Determine Range", "marks": ["tick", "boxplot"], "description": "Find the span of values within the set", "default_scheme": "reverse_complexity", "aggregation_allowed": false},
    {"id": "deviation", "name": "Deviation", "marks": ["bar(rule)", "point(rule)"], "description": "Compare data with certain value like zero or mean", "default_scheme": "complexity", "aggregation_allowed": false},
    {"id": "error_range", "name": "Error Range", "marks": ["errorband", "errorbar"], "description": "Summarizes an error range of quantitative values", "default_scheme": "complexity", "aggregation_allowed": false},
    {"id": "filter", "name": "Filter", "marks": ["rect", "bar", "arc"], "description": "Find data cases satisfying the given constrains", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "find_anomalies", "name": "Find Anomalies", "marks": ["bar", "point"], "description": "Identify any anomalies within the dataset", "default_scheme": "interest", "aggregation_allowed": true},
    {"id": "find_extremum", "name": "Find Extremum", "marks": ["bar", "point"], "description": "Find extreme values of data column", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "magnitude", "name": "Magnitude", "marks": ["arc", "bar"], "description": "Show relative or absolute size comparisons", "default_scheme": "interest", "aggregation_allowed": true},
    {"id": "part_to_whole", "name": "Part to Whole", "marks": ["arc"], "description": "Show component elements of a single entity", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "retrieve_value", "name": "Retrieve Value", "marks": ["rect(text)"], "description": "Find values of specific columns", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "sort", "name": "Sort", "marks": ["bar"], "description": "Rank data according to some ordinal metric", "default_scheme": "reverse_complexity", "aggregation_allowed": true},
    {"id": "spatial", "name": "Spatial", "marks": ["geoshape", "circle(text)"], "description": "Show spatial data like latitude and longitude", "default_scheme": "complexity", "aggregation_allowed": true},
    {"id": "trend", "name": "Trend", "marks": ["point(line)"], "description": "Use regression or loess to show the variation trend", "default_scheme": "complexity", "aggregation_allowed": false}
  ]
}
)json";

class TaskBase {
 public:
  static constexpr int kSupportedVersion = 1;

  // Parses and validates a task table document: every task exactly once, in
  // canonical order, with known marks and schemes.
  static TaskBase parse(std::string_view text) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("task table: ") + e.what());
    }
    if (doc.value("version", 0) != kSupportedVersion) throw ConfigError("task table: unsupported version");
    const auto& tasks = doc.at("tasks");
    if (!tasks.is_array() || tasks.size() != kAllTasks.size()) {
      throw ConfigError("task table: expected " + std::to_string(kAllTasks.size()) + " tasks");
    }
    TaskBase base;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& row = tasks[i];
      TaskDescriptor d;
      const auto id = row.at("id").get<std::string>();
      auto task = parse_task(id);
      if (!task || *task != kAllTasks[i]) throw ConfigError("task table: unexpected task '" + id + "' at row " + std::to_string(i));
      d.task = *task;
      d.name = row.at("name").get<std::string>();
      d.description = row.at("description").get<std::string>();
      for (const auto& m : row.at("marks")) {
        auto spec = parse_mark_spec(m.get<std::string>());
        if (!spec) throw ConfigError("task table: bad mark '" + m.get<std::string>() + "' for " + id);
        d.marks.push_back(*spec);
      }
      if (d.marks.empty()) throw ConfigError("task table: no marks for " + id);
      auto scheme = parse_scheme(row.at("default_scheme").get<std::string>());
      if (!scheme) throw ConfigError("task table: bad default scheme for " + id);
      d.default_scheme = *scheme;
      d.aggregation_allowed = row.at("aggregation_allowed").get<bool>();
      base.rows_[i] = std::move(d);
    }
    return base;
  }

  const TaskDescriptor& descriptor(AnalyticTask t) const { return rows_[static_cast<std::size_t>(t)]; }
  std::vector<TaskDescriptor> list() const { return {rows_.begin(), rows_.end()}; }

 private:
  std::array<TaskDescriptor, 18> rows_;
};

inline const TaskBase& task_base() {
  static const TaskBase base = TaskBase::parse(kBuiltinTaskTable);
  return base;
}

inline std::vector<TaskDescriptor> list_tasks() { return task_base().list(); }

inline const TaskDescriptor& descriptor(AnalyticTask t) { return task_base().descriptor(t); }

inline const std::vector<MarkSpec>& marks_for_task(AnalyticTask t) { return descriptor(t).marks; }

// 1-based rank of `mark` in the task's list, or nullopt if not listed.
inline std::optional<int> mark_priority(AnalyticTask t, const MarkSpec& mark) {
  const auto& marks = marks_for_task(t);
  auto it = std::find(marks.begin(), marks.end(), mark);
  if (it == marks.end()) return std::nullopt;
  return static_cast<int>(it - marks.begin()) + 1;
}

inline bool aggregation_allowed(AnalyticTask t) { return descriptor(t).aggregation_allowed; }

}  // namespace taskvis
