#pragma once
// Candidate chart specifications: a mark, a set of channel encodings with
// their transforms, and an optional trend line.

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskvis/dataset.hpp"
#include "taskvis/tasks.hpp"

namespace taskvis {

// Declaration order is the canonical order: position first, then legends.
enum class Channel { x, y, color, size, shape, theta, latitude, longitude, text };

inline constexpr std::array<Channel, 9> kAllChannels = {Channel::x,     Channel::y,        Channel::color,
                                                        Channel::size,  Channel::shape,    Channel::theta,
                                                        Channel::latitude, Channel::longitude, Channel::text};

inline std::string_view to_string(Channel c) {
  static constexpr std::array<std::string_view, 9> kNames = {"x",     "y",        "color",     "size", "shape",
                                                             "theta", "latitude", "longitude", "text"};
  return kNames[static_cast<std::size_t>(c)];
}

inline std::optional<Channel> parse_channel(std::string_view s) {
  for (Channel c : kAllChannels) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

inline bool is_legend(Channel c) { return c == Channel::color || c == Channel::size || c == Channel::shape; }
inline bool is_axis(Channel c) { return c == Channel::x || c == Channel::y; }

inline constexpr std::size_t kMaxLegends = 2;

enum class Aggregate { sum, count, mean };
enum class Stack { zero, normalize };
enum class Scale { linear, log };
enum class SortOrder { ascending, descending };
enum class Trend { regression, loess };

inline std::string_view to_string(Aggregate a) {
  switch (a) {
    case Aggregate::sum: return "sum";
    case Aggregate::count: return "count";
    case Aggregate::mean: return "mean";
  }
  return "sum";
}
inline std::string_view to_string(Stack s) { return s == Stack::zero ? "zero" : "normalize"; }
inline std::string_view to_string(Scale s) { return s == Scale::linear ? "linear" : "log"; }
inline std::string_view to_string(SortOrder s) { return s == SortOrder::ascending ? "ascending" : "descending"; }
inline std::string_view to_string(Trend t) { return t == Trend::regression ? "regression" : "loess"; }

struct Encoding {
  std::string id;  // e1, e2, ... in canonical channel order
  Channel channel = Channel::x;
  std::optional<std::string> field;  // absent only for a count aggregate
  FieldType ftype = FieldType::quantitative;
  std::optional<Aggregate> aggregate;
  bool bin = false;
  std::optional<SortOrder> sort;  // by the other position axis
  std::optional<Stack> stack;
  std::optional<Scale> scale;

  bool operator==(const Encoding&) const = default;

  // Number of transforms attached to this encoding.
  int transform_count() const {
    return (aggregate ? 1 : 0) + (bin ? 1 : 0) + (sort ? 1 : 0) + (stack ? 1 : 0) + (scale ? 1 : 0);
  }
};

struct CandidateSpec {
  AnalyticTask task = AnalyticTask::sort;
  MarkSpec mark;
  std::vector<Encoding> encodings;
  std::optional<Trend> trend;
  std::string dataset_id;

  bool operator==(const CandidateSpec&) const = default;

  const Encoding* find(Channel c) const {
    for (const auto& e : encodings) {
      if (e.channel == c) return &e;
    }
    return nullptr;
  }
};

// Sorts encodings by channel and renumbers their ids.
inline CandidateSpec normalized(CandidateSpec spec) {
  std::stable_sort(spec.encodings.begin(), spec.encodings.end(),
                   [](const Encoding& a, const Encoding& b) { return a.channel < b.channel; });
  for (std::size_t i = 0; i < spec.encodings.size(); ++i) spec.encodings[i].id = "e" + std::to_string(i + 1);
  return spec;
}

// Chart identity: everything but the task, the dataset and encoding ids.
inline std::string canonicalize(const CandidateSpec& spec) {
  auto opt = [](const auto& v) -> nlohmann::json {
    if (!v) return nullptr;
    return std::string(to_string(*v));
  };
  std::vector<const Encoding*> encs;
  for (const auto& e : spec.encodings) encs.push_back(&e);
  std::stable_sort(encs.begin(), encs.end(), [](const Encoding* a, const Encoding* b) { return a->channel < b->channel; });
  nlohmann::json list = nlohmann::json::array();
  for (const Encoding* e : encs) {
    list.push_back({std::string(to_string(e->channel)),
                    e->field ? nlohmann::json(*e->field) : nlohmann::json(nullptr),
                    std::string(to_string(e->ftype)), opt(e->aggregate), e->bin, opt(e->sort), opt(e->stack),
                    opt(e->scale)});
  }
  return nlohmann::json::array({spec.mark.str(), opt(spec.trend), list}).dump();
}

inline std::set<std::string> spec_fields(const CandidateSpec& spec) {
  std::set<std::string> out;
  for (const auto& e : spec.encodings) {
    if (e.field) out.insert(*e.field);
  }
  return out;
}

// Exchanges the x and y channels (sorting and stacking stay with their field).
inline CandidateSpec swap_xy(CandidateSpec spec) {
  for (auto& e : spec.encodings) {
    if (e.channel == Channel::x) {
      e.channel = Channel::y;
    } else if (e.channel == Channel::y) {
      e.channel = Channel::x;
    }
  }
  return normalized(std::move(spec));
}

struct ChannelProfile {
  std::vector<Channel> required;
  std::vector<Channel> permitted;  // includes the required ones

  bool permits(Channel c) const { return std::find(permitted.begin(), permitted.end(), c) != permitted.end(); }
  bool requires_channel(Channel c) const { return std::find(required.begin(), required.end(), c) != required.end(); }
};

// Which channels a mark can carry. A text overlay adds a required text channel.
inline ChannelProfile channel_profile(const MarkSpec& mark) {
  using C = Channel;
  ChannelProfile p;
  switch (mark.base) {
    case Mark::bar:
    case Mark::line:
    case Mark::area:
    case Mark::errorband:
    case Mark::errorbar:
    case Mark::rect: p = {{C::x, C::y}, {C::x, C::y, C::color}}; break;
    case Mark::point: p = {{C::x, C::y}, {C::x, C::y, C::color, C::size, C::shape}}; break;
    case Mark::tick:
    case Mark::boxplot: p = {{C::x}, {C::x, C::y, C::color}}; break;
    case Mark::arc: p = {{C::theta}, {C::theta, C::color}}; break;
    case Mark::geoshape:
    case Mark::circle: p = {{C::latitude, C::longitude}, {C::latitude, C::longitude, C::color, C::size}}; break;
    case Mark::rule: p = {{C::y}, {C::x, C::y, C::color}}; break;
    case Mark::text: p = {{C::x, C::y, C::text}, {C::x, C::y, C::color, C::text}}; break;
  }
  if (mark.overlay == Mark::text) {
    p.required.push_back(C::text);
    p.permitted.push_back(C::text);
  }
  return p;
}

// Encoding-level well-formedness. `source_type` is the referenced column's
// type, or nullopt when the encoding has no field.
inline std::optional<std::string> encoding_problem(const Encoding& e, std::optional<FieldType> source_type) {
  if (e.field.has_value() != source_type.has_value()) return "field/type mismatch";
  const bool is_count = e.aggregate == Aggregate::count;
  if (is_count == e.field.has_value()) return "count aggregate iff no field";
  if (e.ftype != (is_count ? FieldType::quantitative : source_type.value_or(e.ftype))) return "encoded type differs from column";
  if ((e.aggregate == Aggregate::sum || e.aggregate == Aggregate::mean) && e.ftype != FieldType::quantitative) {
    return "sum/mean need a quantitative field";
  }
  if (e.bin) {
    if (e.aggregate) return "bin and aggregate are exclusive";
    if (e.ftype != FieldType::quantitative && e.ftype != FieldType::temporal) return "bin needs quantitative or temporal";
  }
  const bool axis = is_axis(e.channel);
  if (e.sort && !axis) return "sort only on x or y";
  if (e.scale && !axis) return "scale only on x or y";
  if (e.stack) {
    if (!axis) return "stack only on x or y";
    if (e.aggregate != Aggregate::sum && e.aggregate != Aggregate::count) return "stack needs sum or count";
  }
  if (e.channel == Channel::theta || e.channel == Channel::latitude || e.channel == Channel::longitude ||
      e.channel == Channel::text) {
    if (e.bin || e.sort || e.stack || e.scale) return "channel carries no bin/sort/stack/scale";
  }
  return std::nullopt;
}

// Spec-level well-formedness against a dataset, independent of any rules.
inline std::optional<std::string> spec_problem(const CandidateSpec& spec, const Dataset& ds,
                                               std::size_t max_encodings) {
  if (!is_constructible(spec.mark)) return "mark combination cannot be built";
  if (spec.encodings.size() > max_encodings) return "too many encodings";
  const ChannelProfile profile = channel_profile(spec.mark);
  std::set<Channel> channels;
  std::set<std::string> columns;
  std::size_t legends = 0;
  std::size_t sorts = 0;
  std::size_t stacks = 0;
  bool any_field = false;
  for (const auto& e : spec.encodings) {
    if (!channels.insert(e.channel).second) return "channel used twice";
    if (!profile.permits(e.channel)) return "channel " + std::string(to_string(e.channel)) + " not allowed on " + spec.mark.str();
    std::optional<FieldType> source;
    if (e.field) {
      if (!ds.has_field(*e.field)) return "unknown field " + *e.field;
      if (!columns.insert(*e.field).second) return "field used twice";
      source = ds.field(*e.field).ftype;
      any_field = true;
    }
    if (auto p = encoding_problem(e, source)) return p;
    legends += is_legend(e.channel) ? 1 : 0;
    sorts += e.sort ? 1 : 0;
    stacks += e.stack ? 1 : 0;
  }
  if (!any_field) return "no field encoded";
  if (legends > kMaxLegends) return "more than two legends";
  if (sorts > 1 || stacks > 1) return "at most one sort and one stack";
  for (Channel c : profile.required) {
    if (!channels.count(c)) return "missing required channel " + std::string(to_string(c));
  }
  for (const auto& e : spec.encodings) {
    if (e.sort && !channels.count(e.channel == Channel::x ? Channel::y : Channel::x)) return "sort needs the other axis";
    if (e.stack && !channels.count(Channel::color)) return "stack needs a color encoding";
  }
  if (spec.mark.overlay == Mark::rule) {
    const bool has_raw_quant = std::any_of(spec.encodings.begin(), spec.encodings.end(), [](const Encoding& e) {
      return is_axis(e.channel) && e.ftype == FieldType::quantitative && !e.aggregate && e.field;
    });
    if (!has_raw_quant) return "rule overlay needs a raw quantitative axis";
  }
  if (spec.trend && spec.mark.overlay != Mark::line) return "trend needs a line overlay";
  return std::nullopt;
}

// Invariants tying a spec to its task.
inline std::optional<std::string> task_problem(const CandidateSpec& spec) {
  if (!mark_priority(spec.task, spec.mark)) return "mark not listed for task";
  if (spec.trend && spec.task != AnalyticTask::trend) return "trend only for the trend task";
  if (!aggregation_allowed(spec.task)) {
    for (const auto& e : spec.encodings) {
      if (e.aggregate) return "task forbids aggregation";
    }
  }
  return std::nullopt;
}

}  // namespace taskvis
