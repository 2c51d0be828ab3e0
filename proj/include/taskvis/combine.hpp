#pragma once
// Combination recommendation: a greedily chosen chart set that jointly
// covers the columns of interest.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taskvis/enumerate.hpp"
#include "taskvis/ranking.hpp"
#include "taskvis/rulebase.hpp"

namespace taskvis {

struct CombinationResult {
  std::vector<ScoredSpec> charts;
  std::set<std::string> covered_columns;
  bool complete = false;       // covered ⊇ interested
  std::size_t iterations = 0;  // selections made
  std::size_t comparisons = 0;  // candidate inspections during deletion
  bool partial = false;        // some enumeration hit a limit
};

inline bool covers(const std::set<std::string>& covered, const std::set<std::string>& wanted) {
  return std::includes(covered.begin(), covered.end(), wanted.begin(), wanted.end());
}

// Ranks by task coverage, then repeatedly takes the head of the list, adds
// its columns to the covered set and drops every candidate whose columns
// are all covered already, until the interested columns are covered or no
// candidates remain.
inline CombinationResult combine(std::vector<ScoredSpec> recs, const std::set<std::string>& interested) {
  recs = rank_task_coverage(std::move(recs));
  CombinationResult out;
  while (!covers(out.covered_columns, interested) && !recs.empty()) {
    ++out.iterations;
    out.charts.push_back(recs.front());
    out.covered_columns.insert(recs.front().fields.begin(), recs.front().fields.end());
    out.comparisons += recs.size();
    std::erase_if(recs, [&](const ScoredSpec& vis) { return covers(out.covered_columns, vis.fields); });
  }
  out.complete = covers(out.covered_columns, interested);
  return out;
}

struct CombinationInputs {
  const RuleBase* rules = nullptr;
  rules::RuleSet extra;
  CostTable table = CostTable::defaults();
  EnumerationLimits limits;
};

// Without tasks every enumerable task contributes candidates; with tasks
// only those are enumerated. An empty interest set means all columns.
inline CombinationResult recommend_combination(const Dataset& ds, std::set<std::string> interested,
                                               const std::optional<std::vector<AnalyticTask>>& tasks,
                                               const CombinationInputs& in) {
  std::vector<AnalyticTask> selected = tasks && !tasks->empty() ? *tasks : enumerable_tasks();
  std::erase(selected, AnalyticTask::filter);
  if (interested.empty()) {
    const auto names = ds.field_names();
    interested.insert(names.begin(), names.end());
  }
  const std::vector<std::string> columns(interested.begin(), interested.end());
  std::map<AnalyticTask, std::vector<ScoredSpec>> lists;
  bool partial = false;
  for (AnalyticTask t : selected) {
    auto result = enumerate(ds, columns, t, in.rules->for_task(t, in.extra), in.limits);
    partial = partial || result.partial;
    lists[t] = score_all(result.specs, in.table);
  }
  auto out = combine(merge_dedup(lists), interested);
  out.partial = partial;
  return out;
}

}  // namespace taskvis
