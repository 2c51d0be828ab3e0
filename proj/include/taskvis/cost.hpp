#pragma once
// Component-additive cost model and the chart distance used for clustering.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskvis/chart.hpp"
#include "taskvis/error.hpp"
#include "taskvis/tasks.hpp"

namespace taskvis {

struct ClusterParams {
  double eps = 1.0;
  std::size_t min_pts = 2;

  ClusterParams scaled(double k) const { return {eps * k, min_pts}; }
};

inline const std::array<std::string, 11>& transform_keys() {
  static const std::array<std::string, 11> kKeys = {"sort",          "bin",           "stack_zero",
                                                    "stack_normalize", "aggregate_count", "aggregate_sum",
                                                    "aggregate_mean",  "scale_log",       "scale_linear",
                                                    "regression",      "loess"};
  return kKeys;
}

class CostTable {
 public:
  std::map<Channel, double> channel;
  std::map<std::string, double> transform;
  std::vector<double> rank_costs;  // by 1-based priority within a task
  double overlay = 1.0;
  double swap_cost = 0.5;

  static CostTable defaults() {
    CostTable t;
    t.channel = {{Channel::x, 1},     {Channel::y, 1},        {Channel::color, 2},
                 {Channel::size, 3},  {Channel::shape, 4},    {Channel::text, 5},
                 {Channel::theta, 1}, {Channel::latitude, 1}, {Channel::longitude, 1}};
    t.transform = {{"sort", 1},          {"bin", 1},           {"stack_zero", 1},     {"stack_normalize", 2},
                   {"aggregate_count", 1}, {"aggregate_sum", 2}, {"aggregate_mean", 2}, {"scale_log", 1},
                   {"scale_linear", 1},  {"regression", 3},    {"loess", 3}};
    t.rank_costs = {1, 2, 3};
    return t;
  }

  double channel_cost(Channel c) const {
    auto it = channel.find(c);
    if (it == channel.end()) throw ConfigError("cost table has no entry for channel:" + std::string(to_string(c)));
    return it->second;
  }

  double transform_cost(const std::string& key) const {
    auto it = transform.find(key);
    if (it == transform.end()) throw ConfigError("cost table has no entry for transform:" + key);
    return it->second;
  }

  double mark_cost(AnalyticTask task, const MarkSpec& mark) const {
    auto rank = mark_priority(task, mark);
    if (!rank) throw ConfigError("mark " + mark.str() + " is not listed for task " + std::string(to_string(task)));
    if (static_cast<std::size_t>(*rank) > rank_costs.size()) {
      throw ConfigError("cost table has no entry for mark rank " + std::to_string(*rank));
    }
    return rank_costs[static_cast<std::size_t>(*rank) - 1] + (mark.overlay ? overlay : 0.0);
  }

  CostTable scaled(double k) const {
    CostTable t = *this;
    for (auto& [key, v] : t.channel) v *= k;
    for (auto& [key, v] : t.transform) v *= k;
    for (auto& v : t.rank_costs) v *= k;
    t.overlay *= k;
    t.swap_cost *= k;
    return t;
  }

  // Every channel and transform priced, all values positive, channel tiers
  // x = y < color < size < shape < text, a swap cheaper than any channel,
  // and mark costs rising with rank.
  void validate() const {
    for (Channel c : kAllChannels) {
      if (!channel.count(c)) throw ConfigError("cost table: missing channel " + std::string(to_string(c)));
    }
    for (const auto& k : transform_keys()) {
      if (!transform.count(k)) throw ConfigError("cost table: missing transform " + k);
    }
    auto positive = [](double v, const std::string& what) {
      if (!(v > 0) || !std::isfinite(v)) throw ConfigError("cost table: " + what + " must be positive");
    };
    for (const auto& [c, v] : channel) positive(v, "channel " + std::string(to_string(c)));
    for (const auto& [k, v] : transform) positive(v, "transform " + k);
    positive(overlay, "overlay");
    positive(swap_cost, "swap_cost");
    if (channel.at(Channel::x) != channel.at(Channel::y)) throw ConfigError("cost table: x and y must cost the same");
    const Channel tiers[] = {Channel::x, Channel::color, Channel::size, Channel::shape, Channel::text};
    for (std::size_t i = 1; i < std::size(tiers); ++i) {
      if (!(channel.at(tiers[i - 1]) < channel.at(tiers[i]))) {
        throw ConfigError("cost table: channel costs must rise x/y < color < size < shape < text");
      }
    }
    for (const auto& [c, v] : channel) {
      if (!(swap_cost < v)) throw ConfigError("cost table: swap_cost must be below every channel cost");
    }
    if (rank_costs.size() < 3) throw ConfigError("cost table: need a mark cost for ranks 1 to 3");
    for (std::size_t i = 0; i < rank_costs.size(); ++i) {
      positive(rank_costs[i], "mark rank cost");
      if (i && !(rank_costs[i - 1] < rank_costs[i])) throw ConfigError("cost table: mark costs must rise with rank");
    }
  }
};

struct CostConfig {
  CostTable table = CostTable::defaults();
  ClusterParams cluster;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("cost config: " + where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("cost config: unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace detail

// {"channels": {...}, "transforms": {...}, "marks": {"rank_costs": [..],
//  "overlay": n}, "swap_cost": n, "cluster": {"eps": n, "min_pts": n}}
inline CostConfig parse_cost_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cost config: ") + e.what());
  }
  detail::reject_unknown(doc, {"channels", "transforms", "marks", "swap_cost", "cluster"}, "top level");
  CostConfig cfg;
  try {
    if (doc.contains("channels")) {
      const auto& ch = doc["channels"];
      if (!ch.is_object()) throw ConfigError("cost config: channels must be an object");
      for (const auto& [key, value] : ch.items()) {
        auto c = parse_channel(key);
        if (!c) throw ConfigError("cost config: unknown key '" + key + "' in channels");
        cfg.table.channel[*c] = value.get<double>();
      }
    }
    if (doc.contains("transforms")) {
      const auto& tf = doc["transforms"];
      if (!tf.is_object()) throw ConfigError("cost config: transforms must be an object");
      for (const auto& [key, value] : tf.items()) {
        const auto& keys = transform_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
          throw ConfigError("cost config: unknown key '" + key + "' in transforms");
        }
        cfg.table.transform[key] = value.get<double>();
      }
    }
    if (doc.contains("marks")) {
      const auto& m = doc["marks"];
      detail::reject_unknown(m, {"rank_costs", "overlay"}, "marks");
      if (m.contains("rank_costs")) cfg.table.rank_costs = m["rank_costs"].get<std::vector<double>>();
      if (m.contains("overlay")) cfg.table.overlay = m["overlay"].get<double>();
    }
    if (doc.contains("swap_cost")) cfg.table.swap_cost = doc["swap_cost"].get<double>();
    if (doc.contains("cluster")) {
      const auto& c = doc["cluster"];
      detail::reject_unknown(c, {"eps", "min_pts"}, "cluster");
      if (c.contains("eps")) cfg.cluster.eps = c["eps"].get<double>();
      if (c.contains("min_pts")) cfg.cluster.min_pts = c["min_pts"].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cost config: ") + e.what());
  }
  cfg.table.validate();
  if (!(cfg.cluster.eps >= 0) || cfg.cluster.min_pts < 1) throw ConfigError("cost config: eps >= 0 and min_pts >= 1");
  return cfg;
}

inline CostConfig load_cost_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cost config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cost_config(ss.str());
}

// One priced part of a chart. `key` is what the cost table is indexed by;
// `name` identifies the component for distance computations.
struct Component {
  enum class Kind { mark, channel, transform };
  Kind kind;
  std::string name;
  double cost;

  auto operator<=>(const Component& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    return name <=> o.name;
  }
  bool operator==(const Component& o) const { return kind == o.kind && name == o.name; }
};

inline std::string transform_key(Aggregate a) { return "aggregate_" + std::string(to_string(a)); }
inline std::string transform_key(Stack s) { return "stack_" + std::string(to_string(s)); }
inline std::string transform_key(Scale s) { return "scale_" + std::string(to_string(s)); }

// Channel and transform components of the encodings plus the trend.
inline std::vector<Component> encoding_components(const CandidateSpec& spec, const CostTable& table) {
  std::vector<Component> out;
  for (const auto& e : spec.encodings) {
    const std::string at = std::string(to_string(e.channel)) + "/" + e.field.value_or("") + "/";
    out.push_back({Component::Kind::channel, at + std::string(to_string(e.ftype)), table.channel_cost(e.channel)});
    auto add = [&](const std::string& key, const std::string& name) {
      out.push_back({Component::Kind::transform, at + name, table.transform_cost(key)});
    };
    if (e.aggregate) add(transform_key(*e.aggregate), transform_key(*e.aggregate));
    if (e.bin) add("bin", "bin");
    if (e.sort) add("sort", *e.sort == SortOrder::ascending ? "sort" : "sort_descending");
    if (e.stack) add(transform_key(*e.stack), transform_key(*e.stack));
    if (e.scale) add(transform_key(*e.scale), transform_key(*e.scale));
  }
  if (spec.trend) {
    const std::string key(to_string(*spec.trend));
    out.push_back({Component::Kind::transform, key, table.transform_cost(key)});
  }
  return out;
}

inline std::vector<Component> cost_components(const CandidateSpec& spec, AnalyticTask task, const CostTable& table) {
  std::vector<Component> out;
  out.push_back({Component::Kind::mark, spec.mark.str() + "@" + std::string(to_string(task)), table.mark_cost(task, spec.mark)});
  auto rest = encoding_components(spec, table);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

inline double cost_score(const CandidateSpec& spec, AnalyticTask task, const CostTable& table) {
  double total = 0;
  for (const auto& c : cost_components(spec, task, table)) total += c.cost;
  return total;
}

inline double cost_score(const CandidateSpec& spec, const CostTable& table) { return cost_score(spec, spec.task, table); }

namespace detail {

// Task-independent components: marks are compared by identity, each
// differing base or overlay mark priced at the cheapest mark rank.
inline std::vector<Component> distance_components(const CandidateSpec& spec, const CostTable& table) {
  std::vector<Component> out = encoding_components(spec, table);
  out.push_back({Component::Kind::mark, std::string(to_string(spec.mark.base)), table.rank_costs.front()});
  if (spec.mark.overlay) out.push_back({Component::Kind::mark, "+" + std::string(to_string(*spec.mark.overlay)), table.overlay});
  std::sort(out.begin(), out.end());
  return out;
}

inline double symmetric_difference(const std::vector<Component>& a, const std::vector<Component>& b) {
  double total = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      total += a[i++].cost;
    } else if (i == a.size() || b[j] < a[i]) {
      total += b[j++].cost;
    } else {
      ++i;
      ++j;
    }
  }
  return total;
}

}  // namespace detail

// Symmetric-difference cost of the two component multisets, where reading
// one chart with x and y exchanged costs only the swap cost.
inline double spec_distance(const CandidateSpec& a, const CandidateSpec& b, const CostTable& table) {
  const auto ca = detail::distance_components(a, table);
  const auto cb = detail::distance_components(b, table);
  const double direct = detail::symmetric_difference(ca, cb);
  if (direct == 0) return 0;
  const auto swapped = detail::distance_components(swap_xy(a), table);
  return std::min(direct, table.swap_cost + detail::symmetric_difference(swapped, cb));
}

}  // namespace taskvis
