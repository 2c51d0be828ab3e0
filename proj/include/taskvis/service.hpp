#pragma once
// The recommendation pipeline behind both the HTTP API and the CLI:
// filter, enumerate per task, score, merge, rank and emit.

#include <atomic>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskvis/combine.hpp"
#include "taskvis/cost.hpp"
#include "taskvis/dataset.hpp"
#include "taskvis/enumerate.hpp"
#include "taskvis/ranking.hpp"
#include "taskvis/rulebase.hpp"
#include "taskvis/vegalite.hpp"

namespace taskvis {

enum class Mode { individual, combination };

struct RecommendationRequest {
  std::string dataset_id;
  std::vector<std::string> columns;
  std::vector<AnalyticTask> tasks;
  Mode mode = Mode::individual;
  std::optional<RankingScheme> scheme;  // nullopt = "default"
  std::size_t max_charts = 20;
  std::vector<FilterPredicate> filters;
  bool display_by_task = false;
  std::string extra_rules;  // user partial specification in the rule language
};

struct ChartEntry {
  nlohmann::ordered_json vegalite;
  double cost = 0;
  std::vector<AnalyticTask> covering_tasks;
  std::vector<std::string> fields;
  std::string mark;
  std::string key;
};

struct RecommendationResponse {
  std::vector<ChartEntry> charts;
  std::optional<std::map<AnalyticTask, std::vector<ChartEntry>>> grouped_by_task;
  bool partial = false;
  // combination mode only
  std::optional<bool> complete;
  std::optional<std::vector<std::string>> covered_columns;
};

namespace detail {

inline Value json_operand(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ValidationError("filter operands must be numbers or strings");
}

}  // namespace detail

inline FilterPredicate filter_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("filter must be an object");
  FilterPredicate p;
  p.field = j.at("field").get<std::string>();
  const auto op_name = j.at("op").get<std::string>();
  auto op = parse_filter_op(op_name);
  if (!op) throw ValidationError("unknown filter op '" + op_name + "'");
  p.op = *op;
  if (j.contains("values")) {
    for (const auto& v : j.at("values")) p.operands.push_back(detail::json_operand(v));
  } else if (j.contains("value")) {
    p.operands.push_back(detail::json_operand(j.at("value")));
  }
  return p;
}

inline nlohmann::json filter_to_json(const FilterPredicate& p) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : p.operands) {
    if (auto d = std::get_if<double>(&v)) {
      values.push_back(*d);
    } else {
      values.push_back(std::get<std::string>(v));
    }
  }
  return {{"field", p.field}, {"op", std::string(to_string(p.op))}, {"values", values}};
}

// Parses and checks a request body; throws ValidationError on any problem.
inline RecommendationRequest request_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("request must be a JSON object");
  static const std::set<std::string> kKeys = {"dataset_id", "columns", "tasks",           "mode",       "scheme",
                                              "max_charts", "filters", "display_by_task", "extra_rules"};
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw ValidationError("unknown request key '" + k + "'");
  }
  RecommendationRequest r;
  try {
    r.dataset_id = j.at("dataset_id").get<std::string>();
    if (j.contains("columns")) r.columns = j["columns"].get<std::vector<std::string>>();
    if (j.contains("tasks")) {
      for (const auto& name : j["tasks"].get<std::vector<std::string>>()) {
        auto t = parse_task(name);
        if (!t) throw ValidationError("unknown task '" + name + "'");
        r.tasks.push_back(*t);
      }
    }
    const auto mode = j.value("mode", std::string("individual"));
    if (mode == "individual") {
      r.mode = Mode::individual;
    } else if (mode == "combination") {
      r.mode = Mode::combination;
    } else {
      throw ValidationError("unknown mode '" + mode + "'");
    }
    const auto scheme = j.value("scheme", std::string("default"));
    if (scheme != "default") {
      r.scheme = parse_scheme(scheme);
      if (!r.scheme) throw ValidationError("unknown scheme '" + scheme + "'");
    }
    if (j.contains("max_charts")) {
      const auto& m = j["max_charts"];
      if (!m.is_number_integer() || m.get<long long>() < 1) throw ValidationError("max_charts must be a positive integer");
      r.max_charts = m.get<std::size_t>();
    }
    if (j.contains("filters")) {
      for (const auto& f : j["filters"]) r.filters.push_back(filter_from_json(f));
    }
    r.display_by_task = j.value("display_by_task", false);
    r.extra_rules = j.value("extra_rules", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed request: ") + e.what());
  }
  return r;
}

inline nlohmann::json request_to_json(const RecommendationRequest& r) {
  nlohmann::json tasks = nlohmann::json::array();
  for (auto t : r.tasks) tasks.push_back(std::string(to_string(t)));
  nlohmann::json filters = nlohmann::json::array();
  for (const auto& f : r.filters) filters.push_back(filter_to_json(f));
  nlohmann::json j = {{"dataset_id", r.dataset_id},
                      {"columns", r.columns},
                      {"tasks", tasks},
                      {"mode", r.mode == Mode::individual ? "individual" : "combination"},
                      {"scheme", r.scheme ? std::string(to_string(*r.scheme)) : "default"},
                      {"max_charts", r.max_charts},
                      {"filters", filters},
                      {"display_by_task", r.display_by_task}};
  if (!r.extra_rules.empty()) j["extra_rules"] = r.extra_rules;
  return j;
}

inline nlohmann::ordered_json chart_to_json(const ChartEntry& c, bool with_document = true) {
  nlohmann::ordered_json j;
  if (with_document) j["vegalite"] = c.vegalite;
  j["cost"] = c.cost;
  nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
  for (auto t : c.covering_tasks) tasks.push_back(std::string(to_string(t)));
  j["covering_tasks"] = tasks;
  j["fields"] = c.fields;
  j["mark"] = c.mark;
  j["key"] = c.key;
  return j;
}

inline nlohmann::ordered_json response_to_json(const RecommendationResponse& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json charts = nlohmann::ordered_json::array();
  for (const auto& c : r.charts) charts.push_back(chart_to_json(c));
  j["charts"] = charts;
  if (r.grouped_by_task) {
    nlohmann::ordered_json groups = nlohmann::ordered_json::object();
    for (const auto& [task, list] : *r.grouped_by_task) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& c : list) arr.push_back(chart_to_json(c));
      groups[std::string(to_string(task))] = arr;
    }
    j["grouped_by_task"] = groups;
  }
  j["partial"] = r.partial;
  if (r.complete) j["complete"] = *r.complete;
  if (r.covered_columns) j["covered_columns"] = *r.covered_columns;
  return j;
}

// Ordering, costs and coverage of a response without the documents. The CLI
// writes this as its index; the same function summarizes HTTP responses.
inline nlohmann::ordered_json manifest(const RecommendationResponse& r) {
  nlohmann::ordered_json charts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.charts.size(); ++i) {
    auto entry = chart_to_json(r.charts[i], false);
    char name[32];
    std::snprintf(name, sizeof name, "%03zu.vl.json", i + 1);
    nlohmann::ordered_json out;
    out["file"] = name;
    for (auto& [k, v] : entry.items()) out[k] = v;
    charts.push_back(std::move(out));
  }
  nlohmann::ordered_json j;
  j["charts"] = charts;
  j["partial"] = r.partial;
  if (r.complete) j["complete"] = *r.complete;
  if (r.covered_columns) j["covered_columns"] = *r.covered_columns;
  return j;
}

// Manifest rebuilt from a response body as the HTTP API returns it.
inline nlohmann::ordered_json manifest_from_json(const nlohmann::ordered_json& response) {
  nlohmann::ordered_json charts = nlohmann::ordered_json::array();
  std::size_t i = 0;
  for (const auto& c : response.at("charts")) {
    char name[32];
    std::snprintf(name, sizeof name, "%03zu.vl.json", ++i);
    nlohmann::ordered_json out;
    out["file"] = name;
    for (auto& [k, v] : c.items()) {
      if (k != "vegalite") out[k] = v;
    }
    charts.push_back(std::move(out));
  }
  nlohmann::ordered_json j;
  j["charts"] = charts;
  j["partial"] = response.at("partial");
  if (response.contains("complete")) j["complete"] = response["complete"];
  if (response.contains("covered_columns")) j["covered_columns"] = response["covered_columns"];
  return j;
}

struct EngineConfig {
  std::string rules_dir;
  std::string cost_file;  // empty = built-in defaults
  std::string map_url = "data/maps/us-10m.json";
  EnumerationLimits limits;
  std::optional<std::string> data_url;  // inline data when absent
  VegaLiteVersion version = VegaLiteVersion::v5;
};

class Engine {
 public:
  explicit Engine(const EngineConfig& cfg)
      : rules_(RuleBase::load(cfg.rules_dir)),
        costs_(cfg.cost_file.empty() ? CostConfig{} : load_cost_config(cfg.cost_file)),
        limits_(cfg.limits) {
    emit_.map_url = cfg.map_url;
    emit_.data_url = cfg.data_url;
    emit_.version = cfg.version;
  }

  const RuleBase& rules() const { return rules_; }
  const CostConfig& costs() const { return costs_; }
  const EmitOptions& emit_options() const { return emit_; }

  // The dataset must be the one named by the request.
  RecommendationResponse recommend(const Dataset& source, const RecommendationRequest& req) const {
    if (req.max_charts < 1) throw ValidationError("max_charts must be at least 1");
    for (const auto& c : req.columns) {
      if (!source.has_field(c)) throw ValidationError("unknown column '" + c + "'");
    }
    const rules::RuleSet extra = req.extra_rules.empty() ? rules::RuleSet{} : parse_extra(req.extra_rules);
    for (const auto& f : req.filters) validate_predicate(source, f);
    const Dataset ds = apply_filters(source, req.filters);

    std::vector<AnalyticTask> tasks;
    for (auto t : req.tasks) {
      if (t != AnalyticTask::filter && std::find(tasks.begin(), tasks.end(), t) == tasks.end()) tasks.push_back(t);
    }
    const std::set<std::string> interested(req.columns.begin(), req.columns.end());

    RecommendationResponse out;
    if (req.mode == Mode::combination) {
      CombinationInputs in{&rules_, extra, costs_.table, limits_};
      const std::optional<std::vector<AnalyticTask>> selected =
          tasks.empty() ? std::nullopt : std::optional<std::vector<AnalyticTask>>(tasks);
      auto result = recommend_combination(ds, interested, selected, in);
      out.partial = result.partial;
      out.complete = result.complete;
      out.covered_columns = std::vector<std::string>(result.covered_columns.begin(), result.covered_columns.end());
      if (result.charts.size() > req.max_charts) result.charts.resize(req.max_charts);
      for (const auto& s : result.charts) out.charts.push_back(entry(s, ds));
      return out;
    }

    if (tasks.empty()) tasks = enumerable_tasks();
    RankingScheme scheme = RankingScheme::task_coverage;
    if (req.scheme) {
      scheme = *req.scheme;
    } else if (tasks.size() == 1) {
      scheme = descriptor(tasks.front()).default_scheme;
    }
    if (scheme == RankingScheme::interest && interested.empty()) {
      throw ValidationError("the interest scheme needs at least one column of interest");
    }
    RankingContext ctx{costs_.table, costs_.cluster, interested};

    std::map<AnalyticTask, std::vector<ScoredSpec>> lists;
    for (AnalyticTask t : tasks) {
      auto result = enumerate(ds, req.columns, t, rules_.for_task(t, extra), limits_);
      out.partial = out.partial || result.partial;
      lists[t] = score_all(result.specs, costs_.table);
    }
    if (req.display_by_task) {
      out.grouped_by_task.emplace();
      for (const auto& [t, list] : lists) {
        const RankingScheme own = req.scheme ? *req.scheme : descriptor(t).default_scheme;
        auto ranked = rank(list, own, ctx);
        if (ranked.size() > req.max_charts) ranked.resize(req.max_charts);
        auto& group = (*out.grouped_by_task)[t];
        for (const auto& s : ranked) group.push_back(entry(s, ds));
      }
    }
    auto ranked = rank(merge_dedup(lists), scheme, ctx);
    if (ranked.size() > req.max_charts) ranked.resize(req.max_charts);
    for (const auto& s : ranked) out.charts.push_back(entry(s, ds));
    return out;
  }

 private:
  static rules::RuleSet parse_extra(const std::string& text) {
    try {
      return rules::parse_rules(text, "<request>");
    } catch (const rules::ParseError& e) {
      throw ValidationError(e.what());
    } catch (const rules::UnsafeVariable& e) {
      throw ValidationError(e.what());
    }
  }

  ChartEntry entry(const ScoredSpec& s, const Dataset& ds) const {
    ChartEntry c;
    c.vegalite = to_vegalite(s.spec, ds, emit_);
    c.cost = s.cost;
    c.covering_tasks.assign(s.covering_tasks.begin(), s.covering_tasks.end());
    c.fields.assign(s.fields.begin(), s.fields.end());
    c.mark = s.spec.mark.str();
    c.key = s.key;
    return c;
  }

  RuleBase rules_;
  CostConfig costs_;
  EnumerationLimits limits_;
  EmitOptions emit_;
};

inline nlohmann::ordered_json field_report(const Dataset& ds) {
  nlohmann::ordered_json fields = nlohmann::ordered_json::array();
  for (const auto& f : ds.fields()) {
    nlohmann::ordered_json j;
    j["name"] = f.name;
    j["type"] = std::string(to_string(f.ftype));
    j["inferred"] = f.inferred;
    j["cardinality"] = f.stats.cardinality;
    j["null_count"] = f.stats.null_count;
    j["min"] = f.stats.min ? nlohmann::ordered_json(*f.stats.min) : nlohmann::ordered_json(nullptr);
    j["max"] = f.stats.max ? nlohmann::ordered_json(*f.stats.max) : nlohmann::ordered_json(nullptr);
    j["geo_role"] = f.geo_role ? nlohmann::ordered_json(std::string(to_string(*f.geo_role))) : nlohmann::ordered_json(nullptr);
    fields.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["dataset_id"] = ds.id();
  j["row_count"] = ds.row_count();
  j["fields"] = fields;
  return j;
}

inline nlohmann::ordered_json tasks_report() {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& d : list_tasks()) {
    nlohmann::ordered_json j;
    j["id"] = std::string(to_string(d.task));
    j["name"] = d.name;
    j["description"] = d.description;
    nlohmann::ordered_json marks = nlohmann::ordered_json::array();
    for (const auto& m : d.marks) marks.push_back(m.str());
    j["marks"] = marks;
    j["default_scheme"] = std::string(to_string(d.default_scheme));
    j["aggregation_allowed"] = d.aggregation_allowed;
    j["enumerable"] = d.task != AnalyticTask::filter;
    out.push_back(std::move(j));
  }
  return out;
}

// In-memory dataset store shared by concurrent requests. Datasets are
// immutable; an override swaps in a new version under the same id.
class Registry {
 public:
  std::string add(const std::string& content, LoadOptions opts) {
    const std::uint64_t n = ++counter_;
    opts.id = "ds-" + std::to_string(n) + "-" + detail::hex64(detail::fnv1a(content)).substr(0, 8);
    auto ds = std::make_shared<const Dataset>(load_dataset(content, opts));
    std::unique_lock lock(mutex_);
    datasets_[ds->id()] = ds;
    return ds->id();
  }

  std::shared_ptr<const Dataset> get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) throw NotFound("unknown dataset '" + id + "'");
    return it->second;
  }

  // Applies `change` to the current version and stores the result.
  template <class F>
  std::shared_ptr<const Dataset> update(const std::string& id, F change) {
    std::unique_lock lock(mutex_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) throw NotFound("unknown dataset '" + id + "'");
    auto next = std::make_shared<const Dataset>(change(*it->second));
    it->second = next;
    return next;
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::atomic<std::uint64_t> counter_{0};
};

// Runtime locations, overridable through the environment.
struct RuntimePaths {
  std::string rules_dir;
  std::string cost_file;
  std::string map_file;
  int port = 8080;

  static RuntimePaths from_env(RuntimePaths defaults) {
    if (const char* v = std::getenv("TASKVIS_RULES_DIR")) defaults.rules_dir = v;
    if (const char* v = std::getenv("TASKVIS_COST_FILE")) defaults.cost_file = v;
    if (const char* v = std::getenv("TASKVIS_MAP_FILE")) defaults.map_file = v;
    if (const char* v = std::getenv("TASKVIS_PORT")) defaults.port = std::atoi(v);
    return defaults;
  }
};

}  // namespace taskvis
