#pragma once
// Tabular data model: typed fields with statistics, CSV / JSON record-array
// ingestion, type inference and override, and row filtering.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "taskvis/csv.hpp"
#include "taskvis/error.hpp"
#include "taskvis/temporal.hpp"

namespace taskvis {

enum class FieldType { quantitative, nominal, ordinal, temporal };

inline constexpr FieldType kAllFieldTypes[] = {FieldType::quantitative, FieldType::nominal, FieldType::ordinal,
                                               FieldType::temporal};

inline std::string_view to_string(FieldType t) {
  switch (t) {
    case FieldType::quantitative: return "quantitative";
    case FieldType::nominal: return "nominal";
    case FieldType::ordinal: return "ordinal";
    case FieldType::temporal: return "temporal";
  }
  return "nominal";
}

inline std::optional<FieldType> parse_field_type(std::string_view s) {
  for (FieldType t : kAllFieldTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

enum class GeoRole { latitude, longitude, region };

inline std::string_view to_string(GeoRole r) {
  switch (r) {
    case GeoRole::latitude: return "latitude";
    case GeoRole::longitude: return "longitude";
    case GeoRole::region: return "region";
  }
  return "region";
}

inline std::optional<GeoRole> parse_geo_role(std::string_view s) {
  for (GeoRole r : {GeoRole::latitude, GeoRole::longitude, GeoRole::region}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

inline bool geo_role_fits(GeoRole role, FieldType t) {
  return role == GeoRole::region ? t == FieldType::nominal : t == FieldType::quantitative;
}

struct FieldStats {
  std::size_t cardinality = 0;
  std::size_t null_count = 0;
  std::optional<double> min;
  std::optional<double> max;

  bool operator==(const FieldStats&) const = default;
};

struct Field {
  std::string name;
  FieldType ftype = FieldType::nominal;
  bool inferred = true;
  FieldStats stats;
  std::optional<GeoRole> geo_role;

  bool operator==(const Field&) const = default;
};

// One cell. `text` is absent for nulls. `number` holds the parsed value when
// the owning field stores numbers (quantitative, temporal as epoch seconds,
// numeric ordinal) and is NaN otherwise or when the text does not parse.
struct Cell {
  std::optional<std::string> text;
  double number = std::numeric_limits<double>::quiet_NaN();

  bool is_null() const { return !text.has_value(); }

  friend bool operator==(const Cell& a, const Cell& b) {
    const bool both_nan = std::isnan(a.number) && std::isnan(b.number);
    return a.text == b.text && (both_nan || a.number == b.number);
  }
};

using Row = std::vector<Cell>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

inline bool is_integral(double v) { return std::floor(v) == v && std::fabs(v) < 9.0e15; }

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

inline bool is_null_marker(std::string_view raw) {
  const auto t = detail::trim(raw);
  if (t.empty()) return true;
  const auto l = detail::lower(t);
  return l == "na" || l == "null";
}

// Does this field keep parsed numbers for its cells?
inline bool stores_numbers(FieldType t, std::span<const Cell> column_hint = {}) {
  if (t == FieldType::quantitative || t == FieldType::temporal) return true;
  if (t == FieldType::nominal) return false;
  // ordinal: numeric when every non-null cell is a number
  return std::all_of(column_hint.begin(), column_hint.end(),
                     [](const Cell& c) { return c.is_null() || detail::parse_number(*c.text).has_value(); });
}

inline std::optional<double> parse_as(FieldType t, std::string_view text) {
  switch (t) {
    case FieldType::temporal: return temporal::parse(detail::trim(text));
    case FieldType::quantitative:
    case FieldType::ordinal: return detail::parse_number(text);
    case FieldType::nominal: return std::nullopt;
  }
  return std::nullopt;
}

// Type-inference thresholds.
inline constexpr double kParseShare = 0.95;
inline constexpr std::size_t kOrdinalMaxDistinct = 12;
inline constexpr double kOrdinalMaxSpan = 50.0;

// Decision ladder over non-null cells: temporal if >= 95% parse as ISO dates
// (or windowed bare years); else numeric if >= 95% parse as numbers, where
// small-range integers (<= 12 distinct values spanning <= 50) are ordinal and
// everything else quantitative; else nominal.
inline FieldType infer_field_type(std::span<const std::string> values) {
  std::vector<std::string_view> present;
  present.reserve(values.size());
  for (const auto& v : values) {
    if (!is_null_marker(v)) present.push_back(detail::trim(v));
  }
  if (present.empty()) throw ValidationError("cannot infer a type: every value is null or empty");

  const double needed = kParseShare * static_cast<double>(present.size());
  std::size_t dates = 0;
  for (auto v : present) dates += temporal::parse(v).has_value();
  if (static_cast<double>(dates) >= needed) return FieldType::temporal;

  std::size_t numbers = 0;
  bool all_integral = true;
  std::set<double> distinct;
  for (auto v : present) {
    if (auto n = detail::parse_number(v)) {
      ++numbers;
      all_integral = all_integral && detail::is_integral(*n);
      if (distinct.size() <= kOrdinalMaxDistinct) distinct.insert(*n);
    }
  }
  if (static_cast<double>(numbers) >= needed) {
    if (all_integral && distinct.size() <= kOrdinalMaxDistinct &&
        *distinct.rbegin() - *distinct.begin() <= kOrdinalMaxSpan) {
      return FieldType::ordinal;
    }
    return FieldType::quantitative;
  }
  return FieldType::nominal;
}

inline FieldType infer_field_type(std::initializer_list<std::string> values) {
  std::vector<std::string> v(values);
  return infer_field_type(std::span<const std::string>(v));
}

// Name heuristics for geographic roles, applied to whole words of the name.
inline std::optional<GeoRole> detect_geo_role(std::string_view name, FieldType t) {
  std::vector<std::string> words;
  std::string word;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!word.empty()) {
      words.push_back(std::move(word));
      word.clear();
    }
  }
  if (!word.empty()) words.push_back(std::move(word));
  auto has = [&](std::initializer_list<std::string_view> keys) {
    return std::any_of(words.begin(), words.end(), [&](const std::string& w) {
      return std::find(keys.begin(), keys.end(), w) != keys.end();
    });
  };
  if (t == FieldType::quantitative) {
    if (has({"lat", "latitude"})) return GeoRole::latitude;
    if (has({"lon", "lng", "longitude"})) return GeoRole::longitude;
  }
  if (t == FieldType::nominal && has({"state", "country", "region"})) return GeoRole::region;
  return std::nullopt;
}

class Dataset {
 public:
  Dataset() = default;

  Dataset(std::string id, std::vector<Field> fields, std::vector<Row> rows)
      : id_(std::move(id)), fields_(std::move(fields)), rows_(std::move(rows)) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (!seen.insert(fields_[i].name).second) throw ValidationError("duplicate field name: " + fields_[i].name);
      index_.emplace(fields_[i].name, i);
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].size() != fields_.size()) {
        throw ValidationError("row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                              " cells, expected " + std::to_string(fields_.size()));
      }
    }
  }

  const std::string& id() const { return id_; }
  std::span<const Field> fields() const { return fields_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }

  std::optional<std::size_t> field_index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool has_field(std::string_view name) const { return field_index(name).has_value(); }

  const Field& field(std::string_view name) const {
    auto idx = field_index(name);
    if (!idx) throw NotFound("unknown field: " + std::string(name));
    return fields_[*idx];
  }

  std::vector<std::string> field_names() const {
    std::vector<std::string> names;
    names.reserve(fields_.size());
    for (const auto& f : fields_) names.push_back(f.name);
    return names;
  }

  std::vector<Cell> column(std::size_t idx) const {
    std::vector<Cell> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[idx]);
    return out;
  }

  bool operator==(const Dataset& other) const {
    return id_ == other.id_ && fields_ == other.fields_ && rows_ == other.rows_;
  }

 private:
  std::string id_;
  std::vector<Field> fields_;
  std::vector<Row> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Re-parse the cells of one column for `t` and compute its statistics.
// Cells that do not parse under the type count as missing.
inline FieldStats retype_column(std::vector<Row>& rows, std::size_t idx, FieldType t) {
  std::vector<Cell> column;
  column.reserve(rows.size());
  for (const auto& r : rows) column.push_back(r[idx]);
  const bool numeric = stores_numbers(t, column);

  FieldStats stats;
  std::unordered_set<double> distinct_numbers;
  std::unordered_set<std::string> distinct_text;
  for (auto& row : rows) {
    Cell& cell = row[idx];
    cell.number = std::numeric_limits<double>::quiet_NaN();
    if (cell.is_null()) {
      ++stats.null_count;
      continue;
    }
    if (!numeric) {
      distinct_text.insert(std::string(detail::trim(*cell.text)));
      continue;
    }
    auto v = parse_as(t, *cell.text);
    if (!v) {
      ++stats.null_count;
      continue;
    }
    cell.number = *v;
    distinct_numbers.insert(*v);
    if (t == FieldType::quantitative || t == FieldType::temporal) {
      stats.min = stats.min ? std::min(*stats.min, *v) : *v;
      stats.max = stats.max ? std::max(*stats.max, *v) : *v;
    }
  }
  stats.cardinality = numeric ? distinct_numbers.size() : distinct_text.size();
  return stats;
}

struct LoadOptions {
  enum class Format { automatic, csv, json };
  Format format = Format::automatic;
  std::size_t max_rows = 1'000'000;
  std::optional<std::string> id;  // defaults to a content hash
};

namespace detail {

inline Dataset build_dataset(std::string id, const std::vector<std::string>& names,
                             std::vector<std::vector<std::optional<std::string>>> raw_rows) {
  if (raw_rows.empty()) throw IngestionError("empty dataset: no data rows");
  std::vector<Field> fields;
  std::vector<Row> rows(raw_rows.size());
  for (std::size_t r = 0; r < raw_rows.size(); ++r) {
    rows[r].resize(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
      auto& v = raw_rows[r][c];
      if (v && !is_null_marker(*v)) rows[r][c].text = std::move(*v);
    }
  }
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c].empty()) throw IngestionError("column " + std::to_string(c + 1) + " has an empty name", 1);
    std::vector<std::string> cells;
    cells.reserve(rows.size());
    for (const auto& row : rows) cells.push_back(row[c].text.value_or(""));
    Field f;
    f.name = names[c];
    const bool all_null = std::all_of(rows.begin(), rows.end(), [&](const Row& row) { return row[c].is_null(); });
    f.ftype = all_null ? FieldType::nominal : infer_field_type(cells);
    f.stats = retype_column(rows, c, f.ftype);
    f.geo_role = detect_geo_role(f.name, f.ftype);
    fields.push_back(std::move(f));
  }
  try {
    return Dataset(std::move(id), std::move(fields), std::move(rows));
  } catch (const ValidationError& e) {
    throw IngestionError(e.what(), 1);
  }
}

inline Dataset load_csv(std::string_view source, const LoadOptions& opts, std::string id) {
  auto records = csv::parse(source);
  if (records.empty()) throw IngestionError("empty input");
  const auto& header = records.front().cells;
  std::vector<std::string> names;
  for (const auto& h : header) names.emplace_back(trim(h));
  if (records.size() - 1 > opts.max_rows) {
    throw DatasetTooLarge("dataset has " + std::to_string(records.size() - 1) + " rows; the limit is " +
                          std::to_string(opts.max_rows));
  }
  std::vector<std::vector<std::optional<std::string>>> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    auto& rec = records[i];
    if (rec.cells.size() != names.size()) {
      throw IngestionError("row at line " + std::to_string(rec.line) + " has " + std::to_string(rec.cells.size()) +
                               " cells, expected " + std::to_string(names.size()),
                           rec.line);
    }
    std::vector<std::optional<std::string>> row;
    row.reserve(names.size());
    for (auto& c : rec.cells) row.emplace_back(std::move(c));
    rows.push_back(std::move(row));
  }
  return build_dataset(std::move(id), names, std::move(rows));
}

inline Dataset load_records(std::string_view source, const LoadOptions& opts, std::string id) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestionError(std::string("undecodable record document: ") + e.what());
  }
  if (!doc.is_array()) throw IngestionError("record document must be an array of flat objects");
  if (doc.size() > opts.max_rows) {
    throw DatasetTooLarge("dataset has " + std::to_string(doc.size()) + " rows; the limit is " +
                          std::to_string(opts.max_rows));
  }
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    if (!rec.is_object()) throw IngestionError("record " + std::to_string(i + 1) + " is not an object", i + 1);
    for (auto it = rec.begin(); it != rec.end(); ++it) {
      if (position.emplace(it.key(), names.size()).second) names.push_back(it.key());
    }
  }
  std::vector<std::vector<std::optional<std::string>>> rows;
  rows.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    std::vector<std::optional<std::string>> row(names.size());
    for (auto it = doc[i].begin(); it != doc[i].end(); ++it) {
      const auto& v = it.value();
      auto& slot = row[position.at(it.key())];
      if (v.is_null()) continue;
      if (v.is_string()) {
        slot = v.get<std::string>();
      } else if (v.is_number() || v.is_boolean()) {
        slot = v.dump();
      } else {
        throw IngestionError("record " + std::to_string(i + 1) + " field '" + it.key() + "' is not a scalar", i + 1);
      }
    }
    rows.push_back(std::move(row));
  }
  return build_dataset(std::move(id), names, std::move(rows));
}

}  // namespace detail

inline Dataset load_dataset(std::string_view source, const LoadOptions& opts = {}) {
  const auto body = detail::trim(source);
  if (body.empty()) throw IngestionError("empty input");
  std::string id = opts.id.value_or("ds-" + detail::hex64(detail::fnv1a(source)));
  auto format = opts.format;
  if (format == LoadOptions::Format::automatic) {
    format = body.front() == '[' ? LoadOptions::Format::json : LoadOptions::Format::csv;
  }
  return format == LoadOptions::Format::json ? detail::load_records(source, opts, std::move(id))
                                             : detail::load_csv(source, opts, std::move(id));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Dataset load_dataset_file(const std::string& path, LoadOptions opts = {}) {
  if (opts.format == LoadOptions::Format::automatic) {
    if (path.ends_with(".json")) opts.format = LoadOptions::Format::json;
    if (path.ends_with(".csv")) opts.format = LoadOptions::Format::csv;
  }
  return load_dataset(read_file(path), opts);
}

inline Dataset override_field_type(const Dataset& ds, std::string_view name, FieldType ftype) {
  const auto idx = ds.field_index(name);
  if (!idx) throw NotFound("unknown field: " + std::string(name));
  const Field& current = ds.fields()[*idx];
  if (current.ftype == ftype) return ds;

  std::vector<Row> rows = ds.rows();
  if (ftype == FieldType::quantitative || ftype == FieldType::temporal) {
    for (const auto& row : rows) {
      const Cell& c = row[*idx];
      if (!c.is_null() && !parse_as(ftype, *c.text)) {
        throw ConversionError("field '" + current.name + "' cannot become " + std::string(to_string(ftype)) +
                                  ": value \"" + *c.text + "\" does not parse",
                              *c.text);
      }
    }
  }
  std::vector<Field> fields(ds.fields().begin(), ds.fields().end());
  Field& f = fields[*idx];
  f.ftype = ftype;
  f.inferred = false;
  f.stats = retype_column(rows, *idx, ftype);
  if (f.geo_role && !geo_role_fits(*f.geo_role, ftype)) f.geo_role.reset();
  return Dataset(ds.id(), std::move(fields), std::move(rows));
}

inline Dataset set_geo_role(const Dataset& ds, std::string_view name, std::optional<GeoRole> role) {
  const auto idx = ds.field_index(name);
  if (!idx) throw NotFound("unknown field: " + std::string(name));
  std::vector<Field> fields(ds.fields().begin(), ds.fields().end());
  Field& f = fields[*idx];
  if (role && !geo_role_fits(*role, f.ftype)) {
    throw ValidationError("geo role " + std::string(to_string(*role)) + " does not fit " +
                          std::string(to_string(f.ftype)) + " field '" + f.name + "'");
  }
  f.geo_role = role;
  return Dataset(ds.id(), std::move(fields), ds.rows());
}

enum class FilterOp { eq, neq, lt, le, gt, ge, in, between };

inline std::string_view to_string(FilterOp op) {
  switch (op) {
    case FilterOp::eq: return "eq";
    case FilterOp::neq: return "neq";
    case FilterOp::lt: return "lt";
    case FilterOp::le: return "le";
    case FilterOp::gt: return "gt";
    case FilterOp::ge: return "ge";
    case FilterOp::in: return "in";
    case FilterOp::between: return "between";
  }
  return "eq";
}

inline std::optional<FilterOp> parse_filter_op(std::string_view s) {
  for (FilterOp op : {FilterOp::eq, FilterOp::neq, FilterOp::lt, FilterOp::le, FilterOp::gt, FilterOp::ge,
                      FilterOp::in, FilterOp::between}) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

using Value = std::variant<double, std::string>;

struct FilterPredicate {
  std::string field;
  FilterOp op = FilterOp::eq;
  std::vector<Value> operands;

  bool operator==(const FilterPredicate&) const = default;
};

namespace detail {

inline std::string value_text(const Value& v) {
  if (auto d = std::get_if<double>(&v)) {
    std::ostringstream ss;
    ss << *d;
    return ss.str();
  }
  return std::get<std::string>(v);
}

// Operand as the field compares it: a number for numeric storage, else text.
inline Value typed_operand(const Field& f, bool numeric, const Value& v) {
  if (!numeric) return value_text(v);
  if (auto d = std::get_if<double>(&v)) {
    if (f.ftype == FieldType::temporal) {
      throw ValidationError("operand for temporal field '" + f.name + "' must be a date string");
    }
    return *d;
  }
  auto parsed = parse_as(f.ftype, std::get<std::string>(v));
  if (!parsed) {
    throw ValidationError("operand \"" + std::get<std::string>(v) + "\" does not match " +
                          std::string(to_string(f.ftype)) + " field '" + f.name + "'");
  }
  return *parsed;
}

}  // namespace detail

inline void validate_predicate(const Dataset& ds, const FilterPredicate& p) {
  if (!ds.has_field(p.field)) throw ValidationError("filter on unknown field: " + p.field);
  const std::size_t n = p.operands.size();
  const bool ok = p.op == FilterOp::between ? n == 2 : p.op == FilterOp::in ? n >= 1 : n == 1;
  if (!ok) {
    throw ValidationError("filter '" + std::string(to_string(p.op)) + "' on " + p.field + " got " +
                          std::to_string(n) + " operands");
  }
  const auto idx = *ds.field_index(p.field);
  const Field& f = ds.fields()[idx];
  const auto column = ds.column(idx);
  const bool numeric = stores_numbers(f.ftype, column);
  for (const auto& v : p.operands) detail::typed_operand(f, numeric, v);
}

// Conjunction of predicates. Null (or unparseable) cells satisfy nothing.
inline Dataset apply_filters(const Dataset& ds, std::span<const FilterPredicate> predicates) {
  if (predicates.empty()) return ds;
  struct Prepared {
    std::size_t idx;
    bool numeric;
    FilterOp op;
    std::vector<Value> operands;
  };
  std::vector<Prepared> prepared;
  for (const auto& p : predicates) {
    validate_predicate(ds, p);
    const auto idx = *ds.field_index(p.field);
    const Field& f = ds.fields()[idx];
    const bool numeric = stores_numbers(f.ftype, ds.column(idx));
    Prepared prep{idx, numeric, p.op, {}};
    for (const auto& v : p.operands) prep.operands.push_back(detail::typed_operand(f, numeric, v));
    prepared.push_back(std::move(prep));
  }

  auto matches = [](const Prepared& p, const Cell& cell) {
    if (cell.is_null()) return false;
    if (p.numeric && std::isnan(cell.number)) return false;
    auto cmp = [&](const Value& operand) -> int {
      if (p.numeric) {
        const double o = std::get<double>(operand);
        return cell.number < o ? -1 : cell.number > o ? 1 : 0;
      }
      const auto text = detail::trim(*cell.text);
      const auto& o = std::get<std::string>(operand);
      return text < o ? -1 : text > o ? 1 : 0;
    };
    switch (p.op) {
      case FilterOp::eq: return cmp(p.operands[0]) == 0;
      case FilterOp::neq: return cmp(p.operands[0]) != 0;
      case FilterOp::lt: return cmp(p.operands[0]) < 0;
      case FilterOp::le: return cmp(p.operands[0]) <= 0;
      case FilterOp::gt: return cmp(p.operands[0]) > 0;
      case FilterOp::ge: return cmp(p.operands[0]) >= 0;
      case FilterOp::in:
        return std::any_of(p.operands.begin(), p.operands.end(), [&](const Value& o) { return cmp(o) == 0; });
      case FilterOp::between: return cmp(p.operands[0]) >= 0 && cmp(p.operands[1]) <= 0;
    }
    return false;
  };

  std::vector<Row> rows;
  for (const auto& row : ds.rows()) {
    const bool keep =
        std::all_of(prepared.begin(), prepared.end(), [&](const Prepared& p) { return matches(p, row[p.idx]); });
    if (keep) rows.push_back(row);
  }
  std::vector<Field> fields(ds.fields().begin(), ds.fields().end());
  for (std::size_t i = 0; i < fields.size(); ++i) fields[i].stats = retype_column(rows, i, fields[i].ftype);
  return Dataset(ds.id(), std::move(fields), std::move(rows));
}

}  // namespace taskvis
