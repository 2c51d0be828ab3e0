#pragma once
// Scored candidates and the four ranking schemes: by complexity, by reverse
// complexity over clusters of similar charts, by coverage of the columns of
// interest, and by task coverage after merging per-task lists.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "taskvis/chart.hpp"
#include "taskvis/cost.hpp"
#include "taskvis/error.hpp"
#include "taskvis/tasks.hpp"

namespace taskvis {

struct ScoredSpec {
  CandidateSpec spec;
  double cost = 0;
  std::set<std::string> fields;
  std::set<AnalyticTask> covering_tasks;
  std::string key;  // canonicalize(spec)

  bool operator==(const ScoredSpec&) const = default;
};

inline ScoredSpec score(const CandidateSpec& spec, const CostTable& table) {
  return {spec, cost_score(spec, table), spec_fields(spec), {spec.task}, canonicalize(spec)};
}

inline std::vector<ScoredSpec> score_all(const std::vector<CandidateSpec>& specs, const CostTable& table) {
  std::vector<ScoredSpec> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(score(s, table));
  return out;
}

// Costs that differ only by floating-point noise compare equal, so orderings
// survive rescaling the cost table.
inline constexpr double kRelativeTolerance = 1e-9;

inline bool nearly_equal(double a, double b) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::fabs(a - b) <= kRelativeTolerance * std::max(std::fabs(a), std::fabs(b));
}

namespace detail {

// Sorts by `value` ascending, treating runs of nearly-equal values as ties
// that are then ordered by `tie`.
template <class Value, class Tie>
void sort_tolerant(std::vector<ScoredSpec>& v, Value value, Tie tie) {
  std::sort(v.begin(), v.end(), [&](const ScoredSpec& a, const ScoredSpec& b) {
    const double va = value(a);
    const double vb = value(b);
    if (va != vb) return va < vb;
    return tie(a, b);
  });
  for (std::size_t start = 0; start < v.size();) {
    std::size_t end = start + 1;
    while (end < v.size() && nearly_equal(value(v[start]), value(v[end]))) ++end;
    if (end - start > 1) std::sort(v.begin() + start, v.begin() + end, tie);
    start = end;
  }
}

inline bool by_key(const ScoredSpec& a, const ScoredSpec& b) { return a.key < b.key; }

}  // namespace detail

// Scheme I: ascending cost, ties by canonical form.
inline std::vector<ScoredSpec> rank_complexity(std::vector<ScoredSpec> specs) {
  detail::sort_tolerant(specs, [](const ScoredSpec& s) { return s.cost; }, detail::by_key);
  return specs;
}

// Density-based clustering under spec_distance. A point is core when at
// least min_pts points (itself included) lie within eps. Noise points get
// clusters of their own. Labels follow input order.
inline std::vector<std::size_t> cluster(const std::vector<ScoredSpec>& specs, const ClusterParams& params,
                                        const CostTable& table) {
  const std::size_t n = specs.size();
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = spec_distance(specs[i].spec, specs[j].spec, table);
      if (d <= params.eps || nearly_equal(d, params.eps)) {
        neighbors[i].push_back(j);
        neighbors[j].push_back(i);
      }
    }
  }
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, kUnset);
  auto core = [&](std::size_t i) { return neighbors[i].size() >= params.min_pts; };
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnset || !core(i)) continue;
    const std::size_t id = next++;
    std::vector<std::size_t> frontier{i};
    label[i] = id;
    while (!frontier.empty()) {
      const std::size_t p = frontier.back();
      frontier.pop_back();
      if (!core(p)) continue;
      for (std::size_t q : neighbors[p]) {
        if (label[q] == kUnset) {
          label[q] = id;
          frontier.push_back(q);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kUnset) label[i] = next++;
  }
  return label;
}

// Scheme II: scheme I order, clustered, clusters by descending maximum cost,
// members keeping their scheme I order.
inline std::vector<ScoredSpec> rank_reverse_complexity(std::vector<ScoredSpec> specs, const ClusterParams& params,
                                                       const CostTable& table) {
  specs = rank_complexity(std::move(specs));
  const auto labels = cluster(specs, params, table);
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < specs.size(); ++i) members[labels[i]].push_back(i);
  struct Group {
    double key;
    std::size_t first;
    std::vector<std::size_t> idx;
  };
  std::vector<Group> groups;
  for (auto& [label, idx] : members) {
    double key = -std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) key = std::max(key, specs[i].cost);
    groups.push_back({key, idx.front(), std::move(idx)});
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (!nearly_equal(a.key, b.key)) return a.key > b.key;
    return a.first < b.first;
  });
  std::vector<ScoredSpec> out;
  out.reserve(specs.size());
  for (const auto& g : groups) {
    for (std::size_t i : g.idx) out.push_back(specs[i]);
  }
  return out;
}

// cost * N2 / N1 with N1 the interested columns a chart covers and N2 the
// number of interested columns; infinite when N1 is zero.
inline double interest_cost(const ScoredSpec& s, const std::set<std::string>& interested) {
  std::size_t n1 = 0;
  for (const auto& f : s.fields) n1 += interested.count(f);
  if (n1 == 0) return std::numeric_limits<double>::infinity();
  return s.cost * static_cast<double>(interested.size()) / static_cast<double>(n1);
}

// Scheme III.
inline std::vector<ScoredSpec> rank_interest(std::vector<ScoredSpec> specs, const std::set<std::string>& interested) {
  if (interested.empty()) throw ValidationError("the interest scheme needs at least one column of interest");
  auto adjusted = [&](const ScoredSpec& s) { return interest_cost(s, interested); };
  detail::sort_tolerant(specs, adjusted, [](const ScoredSpec& a, const ScoredSpec& b) {
    if (!nearly_equal(a.cost, b.cost)) return a.cost < b.cost;
    return a.key < b.key;
  });
  return specs;
}

// Union of per-task lists keyed by canonical form. Covering tasks are
// united and costs averaged over occurrences. An entry without covering
// tasks counts for the task of the list it appears in.
inline std::vector<ScoredSpec> merge_dedup(const std::map<AnalyticTask, std::vector<ScoredSpec>>& lists) {
  struct Acc {
    ScoredSpec first;
    double total = 0;
    std::size_t count = 0;
    std::set<AnalyticTask> tasks;
  };
  std::map<std::string, Acc> merged;
  for (const auto& [task, list] : lists) {
    for (const auto& s : list) {
      auto [it, inserted] = merged.try_emplace(s.key, Acc{s, 0, 0, {}});
      it->second.total += s.cost;
      it->second.count += 1;
      if (s.covering_tasks.empty()) {
        it->second.tasks.insert(task);
      } else {
        it->second.tasks.insert(s.covering_tasks.begin(), s.covering_tasks.end());
      }
    }
  }
  std::vector<ScoredSpec> out;
  out.reserve(merged.size());
  for (auto& [key, acc] : merged) {
    ScoredSpec s = std::move(acc.first);
    s.cost = acc.count == 1 ? acc.total : acc.total / static_cast<double>(acc.count);
    s.covering_tasks = std::move(acc.tasks);
    out.push_back(std::move(s));
  }
  return out;
}

// Scheme IV: more covering tasks first, then scheme I.
inline std::vector<ScoredSpec> rank_task_coverage(std::vector<ScoredSpec> specs) {
  std::stable_sort(specs.begin(), specs.end(), [](const ScoredSpec& a, const ScoredSpec& b) {
    return a.covering_tasks.size() > b.covering_tasks.size();
  });
  for (std::size_t start = 0; start < specs.size();) {
    std::size_t end = start + 1;
    while (end < specs.size() && specs[end].covering_tasks.size() == specs[start].covering_tasks.size()) ++end;
    std::vector<ScoredSpec> run(std::make_move_iterator(specs.begin() + start), std::make_move_iterator(specs.begin() + end));
    run = rank_complexity(std::move(run));
    std::move(run.begin(), run.end(), specs.begin() + start);
    start = end;
  }
  return specs;
}

struct RankingContext {
  CostTable table = CostTable::defaults();
  ClusterParams cluster;
  std::set<std::string> interested;
};

inline std::vector<ScoredSpec> rank(std::vector<ScoredSpec> specs, RankingScheme scheme, const RankingContext& ctx) {
  switch (scheme) {
    case RankingScheme::complexity: return rank_complexity(std::move(specs));
    case RankingScheme::reverse_complexity: return rank_reverse_complexity(std::move(specs), ctx.cluster, ctx.table);
    case RankingScheme::interest: return rank_interest(std::move(specs), ctx.interested);
    case RankingScheme::task_coverage: return rank_task_coverage(std::move(specs));
  }
  return specs;
}

}  // namespace taskvis
