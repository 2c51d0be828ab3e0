#pragma once
// Candidate generation: combinatorial search over marks, channel
// assignments and transforms, pruned by the rule base.
//
// Constraints are split by what they can see. Context constraints mention
// only the task, mark and trend and are checked once per mark. Local
// constraints talk about a single encoding variable and filter the options
// of each channel before the search. The rest are checked on complete specs.

#include <chrono>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "taskvis/chart.hpp"
#include "taskvis/dataset.hpp"
#include "taskvis/error.hpp"
#include "taskvis/grounding.hpp"
#include "taskvis/rules.hpp"
#include "taskvis/tasks.hpp"

namespace taskvis {

struct EnumerationLimits {
  std::size_t max_encodings = 4;
  std::size_t max_candidates = 500;
  std::chrono::milliseconds timeout{5000};
};

struct EnumerationResult {
  std::vector<CandidateSpec> specs;  // canonical order
  bool partial = false;              // a limit cut the search short
};

enum class ConstraintScope { context, local, global };

inline ConstraintScope classify(const rules::IntegrityConstraint& c) {
  static const std::set<std::string> kContext = {"task", "mark", "overlay", "trend"};
  static const std::set<std::string> kEncoding = {"channel", "field",   "type",  "aggregate",
                                                  "bin",     "sort_enc", "stack", "scale"};
  static const std::set<std::string> kColumn = {"cardinality", "geo_role"};

  std::optional<std::string> var;
  std::set<std::string> field_columns;  // C in a positive field(E, C)
  bool has_column = false;
  for (const auto& lit : c.body) {
    const auto& a = lit.atom;
    if (a.predicate == "num_encodings") return ConstraintScope::global;
    if (!kEncoding.count(a.predicate)) {
      has_column = has_column || kColumn.count(a.predicate) > 0;
      continue;
    }
    if (a.args.empty() || !a.args[0].is_variable() || a.args[0].is_anonymous()) return ConstraintScope::global;
    if (var && *var != a.args[0].text) return ConstraintScope::global;
    var = a.args[0].text;
    if (a.predicate == "field" && !lit.negated && a.args.size() == 2 && a.args[1].is_variable() &&
        !a.args[1].is_anonymous()) {
      field_columns.insert(a.args[1].text);
    }
  }
  if (!var) return has_column ? ConstraintScope::global : ConstraintScope::context;
  for (const auto& lit : c.body) {
    const auto& a = lit.atom;
    if (kEncoding.count(a.predicate)) continue;
    for (const auto& t : a.args) {
      if (t.is_variable() && t.text == *var) return ConstraintScope::global;
    }
    if (kColumn.count(a.predicate)) {
      if (a.args.empty() || !a.args[0].is_variable() || !field_columns.count(a.args[0].text)) {
        return ConstraintScope::global;
      }
    }
  }
  return ConstraintScope::local;
}

namespace detail {

// Every encoding a channel could carry before rules are applied. An explicit
// linear scale draws the same chart as no scale, so only log is offered.
inline std::vector<Encoding> raw_channel_options(Channel channel, const Dataset& ds,
                                                 const std::vector<std::string>& columns) {
  std::vector<std::optional<std::string>> sources(columns.begin(), columns.end());
  sources.push_back(std::nullopt);
  const std::optional<Aggregate> aggregates[] = {std::nullopt, Aggregate::sum, Aggregate::count, Aggregate::mean};
  const std::optional<SortOrder> sorts[] = {std::nullopt, SortOrder::ascending, SortOrder::descending};
  const std::optional<Stack> stacks[] = {std::nullopt, Stack::zero, Stack::normalize};
  const std::optional<Scale> scales[] = {std::nullopt, Scale::log};

  std::vector<Encoding> out;
  for (const auto& src : sources) {
    const std::optional<FieldType> source_type =
        src ? std::optional<FieldType>(ds.field(*src).ftype) : std::nullopt;
    for (const auto& agg : aggregates) {
      for (bool bin : {false, true}) {
        for (const auto& sort : sorts) {
          for (const auto& stack : stacks) {
            for (const auto& scale : scales) {
              Encoding e;
              e.channel = channel;
              e.field = src;
              e.ftype = (agg == Aggregate::count || !source_type) ? FieldType::quantitative : *source_type;
              e.aggregate = agg;
              e.bin = bin;
              e.sort = sort;
              e.stack = stack;
              e.scale = scale;
              if (!encoding_problem(e, source_type)) out.push_back(std::move(e));
            }
          }
        }
      }
    }
  }
  return out;
}

inline std::vector<std::optional<Trend>> trend_options(AnalyticTask task) {
  if (task == AnalyticTask::trend) return {std::nullopt, Trend::regression, Trend::loess};
  return {std::nullopt};
}

class Search {
 public:
  Search(const Dataset& ds, std::vector<std::string> columns, AnalyticTask task, const rules::RuleSet& rules,
         const EnumerationLimits& limits)
      : ds_(ds), columns_(std::move(columns)), task_(task), rules_(rules), limits_(limits), tokens_(ds) {
    for (const auto& c : rules.constraints) {
      switch (classify(c)) {
        case ConstraintScope::context: context_.constraints.push_back(c); break;
        case ConstraintScope::local: local_.constraints.push_back(c); break;
        case ConstraintScope::global: global_.constraints.push_back(c); break;
      }
    }
    context_.facts = local_.facts = global_.facts = rules.facts;
  }

  EnumerationResult run() {
    deadline_ = std::chrono::steady_clock::now() + limits_.timeout;
    const rules::Checker context_check(context_);
    const rules::Checker local_check(local_);
    const rules::Checker global_check(global_);
    const rules::Checker full_check(rules_);
    local_check_ = &local_check;
    global_check_ = &global_check;
    full_check_ = &full_check;

    for (const MarkSpec& mark : marks_for_task(task_)) {
      for (const auto& trend : trend_options(task_)) {
        if (stopped_) break;
        if (!context_check.admissible(ground_context(task_, mark, trend))) continue;
        search_mark(mark, trend);
      }
    }
    EnumerationResult out;
    out.partial = stopped_;
    out.specs = std::move(found_);
    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < out.specs.size(); ++i) order.emplace_back(canonicalize(out.specs[i]), i);
    std::sort(order.begin(), order.end());
    std::vector<CandidateSpec> sorted;
    sorted.reserve(order.size());
    for (const auto& [key, i] : order) sorted.push_back(std::move(out.specs[i]));
    out.specs = std::move(sorted);
    return out;
  }

 private:
  struct Slot {
    Channel channel;
    bool required = false;
    std::vector<std::vector<Encoding>> by_transforms;  // index = transform count
  };

  void search_mark(const MarkSpec& mark, std::optional<Trend> trend) {
    mark_ = mark;
    trend_ = trend;
    const ChannelProfile profile = channel_profile(mark);
    slots_.clear();
    for (Channel c : kAllChannels) {
      if (!profile.permits(c)) continue;
      Slot slot{c, profile.requires_channel(c), {}};
      for (auto& e : raw_channel_options(c, ds_, columns_)) {
        if (e.aggregate && !aggregation_allowed(task_)) continue;
        if (!local_check_->admissible(ground_single(task_, mark, trend, e, "e0", ds_, tokens_))) continue;
        const auto t = static_cast<std::size_t>(e.transform_count());
        if (slot.by_transforms.size() <= t) slot.by_transforms.resize(t + 1);
        slot.by_transforms[t].push_back(std::move(e));
      }
      slots_.push_back(std::move(slot));
    }
    required_after_.assign(slots_.size() + 1, 0);
    for (std::size_t i = slots_.size(); i-- > 0;) required_after_[i] = required_after_[i + 1] + (slots_[i].required ? 1 : 0);

    const std::size_t min_k = std::max<std::size_t>(1, required_after_[0]);
    const std::size_t max_k = std::min(limits_.max_encodings, slots_.size());
    for (std::size_t k = min_k; k <= max_k && !stopped_; ++k) {
      std::vector<std::size_t> widest;
      for (const auto& s : slots_) widest.push_back(s.by_transforms.empty() ? 0 : s.by_transforms.size() - 1);
      std::sort(widest.rbegin(), widest.rend());
      std::size_t max_t = 0;
      for (std::size_t i = 0; i < k && i < widest.size(); ++i) max_t += widest[i];
      for (std::size_t t = 0; t <= max_t && !stopped_; ++t) {
        k_ = k;
        dfs(0, t);
      }
    }
  }

  void dfs(std::size_t slot, std::size_t budget) {
    if (stopped_) return;
    if ((++steps_ & 1023) == 0 && std::chrono::steady_clock::now() > deadline_) {
      stopped_ = true;
      return;
    }
    const std::size_t chosen = current_.size();
    if (chosen == k_) {
      if (budget == 0 && required_after_[slot] == 0) leaf();
      return;
    }
    if (slot == slots_.size()) return;
    if (slots_.size() - slot < k_ - chosen || required_after_[slot] > k_ - chosen) return;

    const Slot& s = slots_[slot];
    for (std::size_t t = 0; t <= budget && t < s.by_transforms.size(); ++t) {
      for (const Encoding& e : s.by_transforms[t]) {
        if (e.field && used_fields_.count(*e.field)) continue;
        if (is_legend(e.channel) && legends_ == kMaxLegends) continue;
        if (e.sort && sorts_) continue;
        if (e.stack && stacks_) continue;
        push(e);
        dfs(slot + 1, budget - t);
        pop();
        if (stopped_) return;
      }
    }
    if (!s.required) dfs(slot + 1, budget);
  }

  void push(const Encoding& e) {
    current_.push_back(e);
    if (e.field) used_fields_.insert(*e.field);
    legends_ += is_legend(e.channel) ? 1 : 0;
    sorts_ += e.sort ? 1 : 0;
    stacks_ += e.stack ? 1 : 0;
  }

  void pop() {
    const Encoding& e = current_.back();
    if (e.field) used_fields_.erase(*e.field);
    legends_ -= is_legend(e.channel) ? 1 : 0;
    sorts_ -= e.sort ? 1 : 0;
    stacks_ -= e.stack ? 1 : 0;
    current_.pop_back();
  }

  void leaf() {
    CandidateSpec spec;
    spec.task = task_;
    spec.mark = mark_;
    spec.trend = trend_;
    spec.dataset_id = ds_.id();
    spec.encodings = current_;
    spec = normalized(std::move(spec));
    if (spec_problem(spec, ds_, limits_.max_encodings) || task_problem(spec)) return;
    const rules::AtomSet atoms = ground_spec(spec, ds_, tokens_);
    if (!global_check_->admissible(atoms)) return;
    // Local and context pruning is exact; the full check guards soundness.
    if (!full_check_->admissible(atoms)) return;
    if (found_.size() == limits_.max_candidates) {
      stopped_ = true;
      return;
    }
    found_.push_back(std::move(spec));
  }

  const Dataset& ds_;
  std::vector<std::string> columns_;
  AnalyticTask task_;
  const rules::RuleSet& rules_;
  EnumerationLimits limits_;
  ColumnTokens tokens_;
  rules::RuleSet context_;
  rules::RuleSet local_;
  rules::RuleSet global_;
  const rules::Checker* local_check_ = nullptr;
  const rules::Checker* global_check_ = nullptr;
  const rules::Checker* full_check_ = nullptr;

  MarkSpec mark_;
  std::optional<Trend> trend_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> required_after_;
  std::size_t k_ = 0;
  std::vector<Encoding> current_;
  std::multiset<std::string> used_fields_;
  std::size_t legends_ = 0;
  std::size_t sorts_ = 0;
  std::size_t stacks_ = 0;

  std::vector<CandidateSpec> found_;
  bool stopped_ = false;
  std::size_t steps_ = 0;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace detail

// All admissible specs for one task, in canonical order. An empty column
// list makes every dataset column eligible.
inline EnumerationResult enumerate(const Dataset& ds, std::span<const std::string> columns, AnalyticTask task,
                                   const rules::RuleSet& rules, const EnumerationLimits& limits = {}) {
  if (task == AnalyticTask::filter) throw ValidationError("the filter task is applied to data, not enumerated");
  if (limits.max_encodings == 0 || limits.max_candidates == 0 || limits.timeout.count() <= 0) {
    throw ValidationError("enumeration limits must be positive");
  }
  std::vector<std::string> eligible;
  if (columns.empty()) {
    eligible = ds.field_names();
  } else {
    for (const auto& c : columns) {
      if (!ds.has_field(c)) throw NotFound("unknown column '" + c + "'");
      if (std::find(eligible.begin(), eligible.end(), c) == eligible.end()) eligible.push_back(c);
    }
  }
  return detail::Search(ds, std::move(eligible), task, rules, limits).run();
}

inline EnumerationResult enumerate(const Dataset& ds, std::initializer_list<std::string> columns, AnalyticTask task,
                                   const rules::RuleSet& rules, const EnumerationLimits& limits = {}) {
  const std::vector<std::string> cols(columns);
  return enumerate(ds, std::span<const std::string>(cols), task, rules, limits);
}

}  // namespace taskvis
