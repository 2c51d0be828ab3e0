#pragma once
// Translation of a candidate spec plus its dataset and task into ground
// atoms for rule evaluation.
//
// Vocabulary: task/1, mark/1, overlay/1, trend/1, num_encodings/1,
// channel/2, field/2, type/2, aggregate/2, bin/1, sort_enc/1, stack/2,
// scale/2, cardinality/2 and geo_role/2.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taskvis/chart.hpp"
#include "taskvis/dataset.hpp"
#include "taskvis/rules.hpp"

namespace taskvis {

inline constexpr std::size_t kLowCardinality = 10;
inline constexpr std::size_t kMediumCardinality = 50;

inline std::string_view cardinality_bucket(std::size_t cardinality) {
  if (cardinality <= kLowCardinality) return "low";
  if (cardinality <= kMediumCardinality) return "medium";
  return "high";
}

// Column names as rule constants: lowercase, non-alphanumerics replaced by
// '_', a "c_" prefix when the result would not start with a letter or would
// look like an encoding id, and a numeric suffix on collisions. The mapping is a bijection for one dataset.
class ColumnTokens {
 public:
  ColumnTokens() = default;

  explicit ColumnTokens(const Dataset& ds) {
    std::set<std::string> taken;
    for (const auto& f : ds.fields()) {
      std::string base;
      for (char c : f.name) {
        base.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : '_');
      }
      if (base.empty() || !std::islower(static_cast<unsigned char>(base.front())) || looks_like_id(base)) {
        base = "c_" + base;
      }
      std::string token = base;
      for (int n = 2; taken.count(token); ++n) token = base + "_" + std::to_string(n);
      taken.insert(token);
      to_token_[f.name] = token;
      to_name_[token] = f.name;
    }
  }

  const std::string& token(const std::string& name) const { return to_token_.at(name); }
  const std::string& name(const std::string& token) const { return to_name_.at(token); }
  bool has_token(const std::string& token) const { return to_name_.count(token) > 0; }

 private:
  // Encoding ids are e1, e2, ...; column tokens never take that shape.
  static bool looks_like_id(const std::string& s) {
    return s.size() > 1 && s[0] == 'e' &&
           std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }

  std::map<std::string, std::string> to_token_;
  std::map<std::string, std::string> to_name_;
};

namespace grounding {

using rules::Atom;
using rules::AtomSet;
using rules::Term;

inline Atom sym(std::string pred, std::string a) { return rules::atom(std::move(pred), {std::move(a)}); }
inline Atom sym(std::string pred, std::string a, std::string b) {
  return rules::atom(std::move(pred), {std::move(a), std::move(b)});
}

inline void add_context(std::vector<Atom>& out, AnalyticTask task, const MarkSpec& mark, std::optional<Trend> trend) {
  out.push_back(sym("task", std::string(to_string(task))));
  out.push_back(sym("mark", std::string(to_string(mark.base))));
  if (mark.overlay) out.push_back(sym("overlay", std::string(to_string(*mark.overlay))));
  if (trend) out.push_back(sym("trend", std::string(to_string(*trend))));
}

inline void add_encoding(std::vector<Atom>& out, const std::string& id, const Encoding& e, const ColumnTokens& tokens) {
  out.push_back(sym("channel", id, std::string(to_string(e.channel))));
  if (e.field) out.push_back(sym("field", id, tokens.token(*e.field)));
  out.push_back(sym("type", id, std::string(to_string(e.ftype))));
  if (e.aggregate) out.push_back(sym("aggregate", id, std::string(to_string(*e.aggregate))));
  if (e.bin) out.push_back(sym("bin", id));
  if (e.sort) out.push_back(sym("sort_enc", id));
  if (e.stack) out.push_back(sym("stack", id, std::string(to_string(*e.stack))));
  if (e.scale) out.push_back(sym("scale", id, std::string(to_string(*e.scale))));
}

inline void add_column(std::vector<Atom>& out, const Field& f, const ColumnTokens& tokens) {
  const std::string& tok = tokens.token(f.name);
  out.push_back(sym("cardinality", tok, std::string(cardinality_bucket(f.stats.cardinality))));
  if (f.geo_role) out.push_back(sym("geo_role", tok, std::string(to_string(*f.geo_role))));
}

}  // namespace grounding

// Atoms describing only the task, mark and trend.
inline rules::AtomSet ground_context(AnalyticTask task, const MarkSpec& mark, std::optional<Trend> trend) {
  std::vector<rules::Atom> out;
  grounding::add_context(out, task, mark, trend);
  return rules::AtomSet(std::move(out));
}

// Context atoms plus one encoding under the given id, with the atoms of its
// column. Used to evaluate constraints that mention a single encoding.
inline rules::AtomSet ground_single(AnalyticTask task, const MarkSpec& mark, std::optional<Trend> trend,
                                    const Encoding& e, const std::string& id, const Dataset& ds,
                                    const ColumnTokens& tokens) {
  std::vector<rules::Atom> out;
  grounding::add_context(out, task, mark, trend);
  grounding::add_encoding(out, id, e, tokens);
  if (e.field) grounding::add_column(out, ds.field(*e.field), tokens);
  return rules::AtomSet(std::move(out));
}

inline rules::AtomSet ground_spec(const CandidateSpec& raw, const Dataset& ds, const ColumnTokens& tokens) {
  const CandidateSpec spec = normalized(raw);
  std::vector<rules::Atom> out;
  grounding::add_context(out, spec.task, spec.mark, spec.trend);
  out.push_back({"num_encodings", {rules::Term::num(static_cast<std::int64_t>(spec.encodings.size()))}});
  for (const auto& e : spec.encodings) grounding::add_encoding(out, e.id, e, tokens);
  for (const auto& name : spec_fields(spec)) grounding::add_column(out, ds.field(name), tokens);
  return rules::AtomSet(std::move(out));
}

inline rules::AtomSet ground_spec(const CandidateSpec& spec, const Dataset& ds) {
  return ground_spec(spec, ds, ColumnTokens(ds));
}

}  // namespace taskvis
