#pragma once
// Vega-Lite document emission.

#include <cmath>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "taskvis/chart.hpp"
#include "taskvis/dataset.hpp"

namespace taskvis {

enum class VegaLiteVersion { v4, v5 };

struct EmitOptions {
  VegaLiteVersion version = VegaLiteVersion::v5;
  std::optional<std::string> schema_url;  // overrides the version URL
  std::optional<std::string> data_url;    // inline values when absent
  std::string map_url = "data/maps/us-10m.json";
  std::string map_feature = "states";
  std::string projection = "albersUsa";
};

inline std::string schema_url(VegaLiteVersion v) {
  return v == VegaLiteVersion::v4 ? "https://vega.github.io/schema/vega-lite/v4.json"
                                  : "https://vega.github.io/schema/vega-lite/v5.json";
}

namespace vl {

using Json = nlohmann::ordered_json;

// Dots and brackets in field names are path syntax in Vega-Lite.
inline std::string field_ref(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == '.' || c == '[' || c == ']' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

inline Json field_def(const Encoding& e) {
  Json def;
  def["type"] = std::string(to_string(e.ftype));
  if (e.aggregate) def["aggregate"] = std::string(to_string(*e.aggregate));
  if (e.field) def["field"] = field_ref(*e.field);
  if (e.bin) def["bin"] = true;
  if (e.sort) {
    std::string by = e.channel == Channel::x ? "y" : "x";
    def["sort"] = *e.sort == SortOrder::ascending ? by : "-" + by;
  }
  if (e.stack) def["stack"] = std::string(to_string(*e.stack));
  if (e.scale) def["scale"] = {{"type", std::string(to_string(*e.scale))}};
  return def;
}

inline Json encoding_block(const CandidateSpec& spec, bool (*keep)(Channel)) {
  Json enc = Json::object();
  for (const auto& e : spec.encodings) {
    if (keep(e.channel)) enc[std::string(to_string(e.channel))] = field_def(e);
  }
  return enc;
}

inline bool any_channel(Channel) { return true; }
inline bool not_text(Channel c) { return c != Channel::text; }
inline bool is_geo(Channel c) { return c == Channel::latitude || c == Channel::longitude; }

inline Json data_block(const Dataset& ds, const EmitOptions& opts) {
  if (opts.data_url) return {{"url", *opts.data_url}};
  Json values = Json::array();
  const auto fields = ds.fields();
  for (const auto& row : ds.rows()) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const Cell& cell = row[i];
      if (cell.is_null()) {
        obj[fields[i].name] = nullptr;
      } else if (fields[i].ftype != FieldType::temporal && !std::isnan(cell.number)) {
        obj[fields[i].name] = cell.number;
      } else {
        obj[fields[i].name] = *cell.text;
      }
    }
    values.push_back(std::move(obj));
  }
  return {{"values", std::move(values)}};
}

// Position channels a text layer copies from its base layer.
inline Json label_layer(const CandidateSpec& spec) {
  Json enc = Json::object();
  for (const auto& e : spec.encodings) {
    if (e.channel == Channel::x || e.channel == Channel::y || is_geo(e.channel) || e.channel == Channel::text) {
      Json def = field_def(e);
      def.erase("sort");
      def.erase("stack");
      enc[std::string(to_string(e.channel))] = std::move(def);
    }
  }
  return {{"mark", "text"}, {"encoding", std::move(enc)}};
}

inline Json rule_layer(const CandidateSpec& spec) {
  const Encoding* target = nullptr;
  for (Channel c : {Channel::y, Channel::x}) {
    const Encoding* e = spec.find(c);
    if (e && e->field && e->ftype == FieldType::quantitative && !e->aggregate) {
      target = e;
      break;
    }
  }
  Json enc = Json::object();
  if (target) {
    enc[std::string(to_string(target->channel))] = {
        {"type", "quantitative"}, {"aggregate", "mean"}, {"field", field_ref(*target->field)}};
  }
  return {{"mark", "rule"}, {"encoding", std::move(enc)}};
}

inline Json line_layer(const CandidateSpec& spec) {
  Json enc = Json::object();
  const Encoding* x = spec.find(Channel::x);
  const Encoding* y = spec.find(Channel::y);
  const Encoding* color = spec.find(Channel::color);
  const bool grouped = color && color->field && (color->ftype == FieldType::nominal || color->ftype == FieldType::ordinal);
  for (const Encoding* e : {x, y}) {
    if (!e) continue;
    Json def = field_def(*e);
    def.erase("sort");
    enc[std::string(to_string(e->channel))] = std::move(def);
  }
  if (grouped) enc["color"] = field_def(*color);
  Json layer = {{"mark", "line"}, {"encoding", std::move(enc)}};
  if (spec.trend && x && y && x->field && y->field) {
    Json t = {{std::string(to_string(*spec.trend)), field_ref(*y->field)}, {"on", field_ref(*x->field)}};
    if (grouped) t["groupby"] = Json::array({field_ref(*color->field)});
    layer["transform"] = Json::array({std::move(t)});
  }
  return layer;
}

}  // namespace vl

inline nlohmann::ordered_json to_vegalite(const CandidateSpec& raw, const Dataset& ds, const EmitOptions& opts = {}) {
  using vl::Json;
  const CandidateSpec spec = normalized(raw);
  Json doc;
  doc["$schema"] = opts.schema_url ? *opts.schema_url : schema_url(opts.version);
  doc["data"] = vl::data_block(ds, opts);

  const bool geographic =
      std::any_of(spec.encodings.begin(), spec.encodings.end(), [](const Encoding& e) { return vl::is_geo(e.channel); });
  if (geographic) doc["projection"] = {{"type", opts.projection}};

  const std::string base(to_string(spec.mark.base));
  if (spec.mark.base == Mark::geoshape) {
    // Region outlines as a basemap under the data points.
    Json basemap = {{"data", {{"url", opts.map_url}, {"format", {{"type", "topojson"}, {"feature", opts.map_feature}}}}},
                    {"mark", {{"type", "geoshape"}, {"fill", "lightgray"}, {"stroke", "white"}}}};
    Json points = {{"mark", "circle"}, {"encoding", vl::encoding_block(spec, vl::any_channel)}};
    doc["layer"] = Json::array({std::move(basemap), std::move(points)});
    return doc;
  }
  if (!spec.mark.overlay) {
    doc["mark"] = base;
    doc["encoding"] = vl::encoding_block(spec, vl::any_channel);
    return doc;
  }
  Json first = {{"mark", base}, {"encoding", vl::encoding_block(spec, vl::not_text)}};
  Json second;
  switch (*spec.mark.overlay) {
    case Mark::text: second = vl::label_layer(spec); break;
    case Mark::rule: second = vl::rule_layer(spec); break;
    default: second = vl::line_layer(spec); break;
  }
  doc["layer"] = Json::array({std::move(first), std::move(second)});
  return doc;
}

}  // namespace taskvis
