#pragma once
// Generate-then-filter reference for enumerate(). It builds every channel
// assignment a mark could carry and keeps those that pass the structural
// checks and the full rule set. No constraint classification, no pruning
// beyond dropping a repeated column as soon as it appears. Explicit linear
// scales are outside the design space, as in the enumerator.

#include <set>
#include <string>
#include <vector>

#include "taskvis/taskvis.hpp"

namespace oracle {

using namespace taskvis;

inline std::vector<Encoding> options(Channel channel, const Dataset& ds, const std::vector<std::string>& columns) {
  std::vector<Encoding> out;
  std::vector<std::optional<std::string>> sources(columns.begin(), columns.end());
  sources.push_back(std::nullopt);
  for (const auto& src : sources) {
    for (int agg = -1; agg < 3; ++agg) {
      for (int bin = 0; bin < 2; ++bin) {
        for (int sort = -1; sort < 2; ++sort) {
          for (int stack = -1; stack < 2; ++stack) {
            for (int scale = -1; scale < 1; ++scale) {
              Encoding e;
              e.channel = channel;
              e.field = src;
              if (agg >= 0) e.aggregate = static_cast<Aggregate>(agg);
              e.bin = bin == 1;
              if (sort >= 0) e.sort = static_cast<SortOrder>(sort);
              if (stack >= 0) e.stack = static_cast<Stack>(stack);
              if (scale >= 0) e.scale = Scale::log;
              // Every encoded type is tried; the checks decide.
              for (FieldType t : kAllFieldTypes) {
                e.ftype = t;
                std::optional<FieldType> source = src ? std::optional(ds.field(*src).ftype) : std::nullopt;
                if (!encoding_problem(e, source)) out.push_back(e);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

struct Reference {
  std::set<std::string> keys;
  std::size_t leaves = 0;
};

inline Reference enumerate(const Dataset& ds, const std::vector<std::string>& columns, AnalyticTask task,
                           const rules::RuleSet& rules, std::size_t max_encodings) {
  Reference ref;
  const rules::Checker checker(rules);
  std::vector<std::optional<Trend>> trends{std::nullopt, Trend::regression, Trend::loess};
  for (const MarkSpec& mark : all_mark_specs()) {
    if (!mark_priority(task, mark)) continue;
    const auto profile = channel_profile(mark);
    std::vector<std::vector<Encoding>> per_channel;
    for (Channel c : profile.permitted) per_channel.push_back(options(c, ds, columns));
    const std::size_t n = profile.permitted.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<std::size_t> picked;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) picked.push_back(i);
      }
      if (picked.size() > max_encodings) continue;
      std::vector<Encoding> current;
      std::set<std::string> used;
      auto rec = [&](auto&& self, std::size_t depth) -> void {
        if (depth == picked.size()) {
          for (const auto& trend : trends) {
            ++ref.leaves;
            CandidateSpec spec;
            spec.task = task;
            spec.mark = mark;
            spec.trend = trend;
            spec.dataset_id = ds.id();
            spec.encodings = current;
            spec = normalized(std::move(spec));
            if (spec_problem(spec, ds, max_encodings) || task_problem(spec)) continue;
            if (!checker.admissible(ground_spec(spec, ds))) continue;
            ref.keys.insert(canonicalize(spec));
          }
          return;
        }
        for (const auto& e : per_channel[picked[depth]]) {
          if (e.field && used.count(*e.field)) continue;
          if (e.field) used.insert(*e.field);
          current.push_back(e);
          self(self, depth + 1);
          current.pop_back();
          if (e.field) used.erase(*e.field);
        }
      };
      rec(rec, 0);
    }
  }
  return ref;
}

}  // namespace oracle
