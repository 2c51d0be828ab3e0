// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "taskvis/http.hpp"
#include "taskvis/taskvis.hpp"

using namespace taskvis;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, fixed here so a run is reproducible.
constexpr double kGoldenSeconds = 1.0;
constexpr std::size_t kOracleMaxEncodings = 3;
constexpr std::size_t kScalingTables = 120;
constexpr double kScaleMin = 1e-3;
constexpr double kScaleMax = 1e3;
constexpr std::size_t kCombineRandomRounds = 500;
constexpr int kConcurrentStreams = 6;
constexpr int kRequestsPerStream = 4;

const std::string kGoldenKey =
    R"(["bar",null,[["x","Cylinders","ordinal",null,false,"ascending",null,null],)"
    R"(["y","Horsepower","quantitative","sum",false,null,"zero",null],)"
    R"(["color","Origin","nominal",null,false,null,null,null]]])";

// Collects failure notes for one criterion.
struct Verdict {
  std::vector<std::string> problems;
  std::string summary;

  void expect(bool ok, const std::string& what) {
    if (!ok && problems.size() < 5) problems.push_back(what);
    if (!ok) ++failures;
  }
  std::size_t failures = 0;
};

int g_failed = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = v.failures == 0;
  g_failed += !ok;
  std::printf("[%s] %2d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name.c_str(), v.summary.c_str(), secs);
  for (const auto& p : v.problems) std::printf("       %s\n", p.c_str());
  std::fflush(stdout);
}

struct Run {
  Dataset ds;
  AnalyticTask task;
  EnumerationResult result;
};

const std::vector<Run>& all_runs() {
  static const std::vector<Run> runs = [] {
    std::vector<Run> out;
    for (const auto& ds : fixtures::all_datasets()) {
      for (AnalyticTask t : enumerable_tasks()) {
        out.push_back({ds, t, enumerate(ds, std::span<const std::string>{}, t, fixtures::rules().for_task(t))});
      }
    }
    return out;
  }();
  return runs;
}

std::vector<std::string> keys(const std::vector<ScoredSpec>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(s.key);
  return out;
}

ScoredSpec fake(const std::string& key, double cost, std::set<std::string> fields, std::set<AnalyticTask> tasks = {}) {
  ScoredSpec s;
  s.key = key;
  s.cost = cost;
  s.fields = std::move(fields);
  s.covering_tasks = std::move(tasks);
  return s;
}

Encoding enc(Channel c, std::optional<std::string> field, FieldType t) {
  Encoding e;
  e.channel = c;
  e.field = std::move(field);
  e.ftype = t;
  return e;
}

CandidateSpec spec(AnalyticTask task, MarkSpec mark, std::vector<Encoding> encodings) {
  CandidateSpec s;
  s.task = task;
  s.mark = mark;
  s.dataset_id = "cars";
  s.encodings = std::move(encodings);
  return normalized(s);
}

std::vector<ScoredSpec> candidates(const Dataset& ds, std::initializer_list<std::string> cols, AnalyticTask t,
                                   const CostTable& table) {
  return score_all(enumerate(ds, cols, t, fixtures::rules().for_task(t)).specs, table);
}

std::vector<ScoredSpec> rescored(const std::vector<ScoredSpec>& in, const CostTable& table) {
  std::vector<CandidateSpec> v;
  for (const auto& s : in) v.push_back(s.spec);
  auto out = score_all(v, table);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].covering_tasks = in[i].covering_tasks;
  return out;
}

EngineConfig engine_config() {
  EngineConfig cfg;
  cfg.rules_dir = TASKVIS_DEFAULT_RULES_DIR;
  cfg.cost_file = TASKVIS_DEFAULT_COST_FILE;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("taskvis-acceptance-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

// ---------------------------------------------------------------------------

Verdict golden() {
  Verdict v;
  const Dataset cars = fixtures::cars();
  const auto start = std::chrono::steady_clock::now();
  const auto res = enumerate(cars, {"Cylinders", "Horsepower", "Origin"}, AnalyticTask::sort,
                             fixtures::rules().for_task(AnalyticTask::sort));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool found =
      std::any_of(res.specs.begin(), res.specs.end(), [](const auto& s) { return canonicalize(s) == kGoldenKey; });
  v.expect(found, "stacked bar not among " + std::to_string(res.specs.size()) + " candidates");
  v.expect(secs < kGoldenSeconds, "enumeration took " + std::to_string(secs) + " s");
  v.summary = std::to_string(res.specs.size()) + " candidates, enumeration " + std::to_string(secs * 1000).substr(0, 6) +
              " ms (limit " + std::to_string(kGoldenSeconds).substr(0, 3) + " s)";
  return v;
}

Verdict mark_conformance() {
  Verdict v;
  std::size_t total = 0;
  for (const auto& run : all_runs()) {
    for (const auto& s : run.result.specs) {
      ++total;
      v.expect(mark_priority(run.task, s.mark).has_value() && s.task == run.task,
               run.ds.id() + " " + std::string(to_string(run.task)) + " emitted " + s.mark.str());
    }
  }
  v.expect(total > 0, "nothing enumerated");
  v.summary = std::to_string(total) + " specs over " + std::to_string(all_runs().size()) + " dataset/task pairs, " +
              std::to_string(v.failures) + " violations";
  return v;
}

Verdict oracle_equality() {
  Verdict v;
  EnumerationLimits unbounded;
  unbounded.max_encodings = kOracleMaxEncodings;
  unbounded.max_candidates = 10'000'000;
  unbounded.timeout = std::chrono::minutes(10);
  std::size_t pairs = 0;
  std::size_t specs = 0;
  for (const auto& name : fixtures::small_names()) {
    const Dataset ds = fixtures::load(name);
    const auto names = ds.field_names();
    v.expect(names.size() <= 3, name + " has more than three columns");
    for (AnalyticTask t : enumerable_tasks()) {
      ++pairs;
      const auto rules = fixtures::rules().for_task(t);
      const auto ref = oracle::enumerate(ds, names, t, rules, kOracleMaxEncodings);
      const auto got = enumerate(ds, std::span<const std::string>(names), t, rules, unbounded);
      std::set<std::string> got_keys;
      for (const auto& s : got.specs) {
        got_keys.insert(canonicalize(s));
        v.expect(rules::check(ground_spec(s, ds), rules).empty(), name + " " + canonicalize(s) + " fails check()");
      }
      specs += got.specs.size();
      v.expect(!got.partial, name + " " + std::string(to_string(t)) + " hit a limit");
      v.expect(got_keys.size() == got.specs.size(), name + " " + std::string(to_string(t)) + " has duplicates");
      v.expect(got_keys == ref.keys, name + " " + std::string(to_string(t)) + ": " + std::to_string(got_keys.size()) +
                                         " vs oracle " + std::to_string(ref.keys.size()));
    }
  }
  v.summary = std::to_string(pairs) + " fixture/task pairs, " + std::to_string(specs) +
              " specs equal to the generate-and-filter set and re-checked";
  return v;
}

Verdict no_aggregation() {
  Verdict v;
  const std::set<AnalyticTask> tasks = {AnalyticTask::determine_range, AnalyticTask::trend, AnalyticTask::deviation,
                                        AnalyticTask::error_range};
  std::size_t checked = 0;
  for (const auto& run : all_runs()) {
    if (!tasks.count(run.task)) continue;
    for (const auto& s : run.result.specs) {
      ++checked;
      for (const auto& e : s.encodings) v.expect(!e.aggregate, run.ds.id() + " " + canonicalize(s));
    }
  }
  v.expect(checked > 0, "no specs for the four tasks");
  v.summary = std::to_string(checked) + " specs, " + std::to_string(v.failures) + " aggregates";
  return v;
}

Verdict temporal_gate() {
  Verdict v;
  std::size_t with = 0;
  std::size_t without = 0;
  std::size_t specs = 0;
  for (const auto& run : all_runs()) {
    if (run.task != AnalyticTask::change_over_time) continue;
    const bool temporal = std::any_of(run.ds.fields().begin(), run.ds.fields().end(),
                                      [](const Field& f) { return f.ftype == FieldType::temporal; });
    (temporal ? with : without) += 1;
    if (!temporal) v.expect(run.result.specs.empty(), run.ds.id() + " has no temporal column but got charts");
    for (const auto& s : run.result.specs) {
      ++specs;
      const Encoding* x = s.find(Channel::x);
      v.expect(x && x->ftype == FieldType::temporal, run.ds.id() + " " + canonicalize(s));
    }
  }
  v.expect(with > 0 && without > 0, "fixtures must include datasets with and without temporal columns");
  v.summary = std::to_string(with) + " temporal datasets (" + std::to_string(specs) + " specs), " +
              std::to_string(without) + " without";
  return v;
}

Verdict ranking_properties() {
  Verdict v;
  const CostTable table = CostTable::defaults();
  const Dataset cars = fixtures::cars();

  // Scheme I
  const auto sort_cands = candidates(cars, {"Cylinders", "Horsepower", "Origin"}, AnalyticTask::sort, table);
  const auto ranked1 = rank_complexity(sort_cands);
  for (std::size_t i = 1; i < ranked1.size(); ++i) v.expect(ranked1[i - 1].cost <= ranked1[i].cost, "scheme I not sorted");

  // Scheme III: a 5-chart fixture, adjusted cost = cost * |interested| / covered.
  const std::vector<ScoredSpec> five = {fake("c1", 4, {"A"}), fake("c2", 6, {"A", "B"}), fake("c3", 1, {"C"}),
                                        fake("c4", 3, {"B", "C"}), fake("c5", 7, {"A", "B", "C"})};
  v.expect(keys(rank_interest(five, {"A", "B"})) == std::vector<std::string>{"c4", "c2", "c5", "c1", "c3"},
           "scheme III hand order");
  std::vector<ScoredSpec> covering;
  for (const auto& c : sort_cands) {
    if (c.fields.count("Cylinders") && c.fields.count("Horsepower")) covering.push_back(c);
  }
  v.expect(!covering.empty(), "no covering charts");
  v.expect(keys(rank_interest(covering, {"Cylinders", "Horsepower"})) == keys(rank_complexity(covering)),
           "scheme III differs from scheme I under full coverage");

  // Scheme IV
  std::map<AnalyticTask, std::vector<ScoredSpec>> single = {{AnalyticTask::sort, sort_cands}};
  v.expect(keys(rank_task_coverage(merge_dedup(single))) == keys(ranked1), "scheme IV single task differs from scheme I");
  std::map<AnalyticTask, std::vector<ScoredSpec>> several;
  for (AnalyticTask t : {AnalyticTask::sort, AnalyticTask::comparison, AnalyticTask::magnitude, AnalyticTask::characterize_distribution}) {
    several[t] = candidates(cars, {"Cylinders", "Horsepower", "Origin"}, t, table);
  }
  const auto ranked4 = rank_task_coverage(merge_dedup(several));
  bool shared = false;
  for (std::size_t i = 0; i < ranked4.size(); ++i) {
    shared = shared || ranked4[i].covering_tasks.size() > 1;
    if (i) v.expect(ranked4[i - 1].covering_tasks.size() >= ranked4[i].covering_tasks.size(), "scheme IV coverage rises");
  }
  v.expect(shared, "no chart covers two tasks");

  // Scheme II: hand-traced six charts. Clusters {s1,s2} and {s4,s5}; blocks by
  // descending maximum cost give s4 s5 s3 s6 s1 s2.
  const auto t = AnalyticTask::comparison;
  const Encoding hp_x = enc(Channel::x, "Horsepower", FieldType::quantitative);
  const Encoding mpg_y = enc(Channel::y, "Miles_per_Gallon", FieldType::quantitative);
  Encoding hp_mean = enc(Channel::y, "Horsepower", FieldType::quantitative);
  hp_mean.aggregate = Aggregate::mean;
  Encoding origin_sorted = enc(Channel::x, "Origin", FieldType::nominal);
  origin_sorted.sort = SortOrder::ascending;
  const std::vector<CandidateSpec> six = {
      spec(t, {Mark::point, std::nullopt}, {hp_x, mpg_y}),
      spec(t, {Mark::point, std::nullopt},
           {enc(Channel::x, "Miles_per_Gallon", FieldType::quantitative), enc(Channel::y, "Horsepower", FieldType::quantitative)}),
      spec(t, {Mark::point, std::nullopt}, {hp_x, mpg_y, enc(Channel::color, "Origin", FieldType::nominal)}),
      spec(t, {Mark::bar, std::nullopt}, {enc(Channel::x, "Origin", FieldType::nominal), hp_mean}),
      spec(t, {Mark::bar, std::nullopt}, {origin_sorted, hp_mean}),
      spec(t, {Mark::line, std::nullopt}, {enc(Channel::x, "Year", FieldType::temporal), hp_mean}),
  };
  auto scored = score_all(six, table);
  for (std::size_t i = 0; i < scored.size(); ++i) scored[i].key = "s" + std::to_string(i + 1) + scored[i].key;
  const std::vector<ScoredSpec> shuffled = {scored[5], scored[2], scored[4], scored[0], scored[3], scored[1]};
  std::vector<std::string> order;
  for (const auto& s : rank_reverse_complexity(shuffled, ClusterParams{}, table)) order.push_back(s.key.substr(0, 2));
  v.expect(order == std::vector<std::string>{"s4", "s5", "s3", "s6", "s1", "s2"}, "scheme II hand trace");

  // Scheme II on real candidates: a permutation whose clusters are contiguous
  // blocks kept in scheme I order.
  const auto ranked2 = rank_reverse_complexity(sort_cands, ClusterParams{}, table);
  auto a = keys(sort_cands);
  auto b = keys(ranked2);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  v.expect(a == b, "scheme II is not a permutation");
  const auto labels = cluster(ranked2, ClusterParams{}, table);
  std::set<std::size_t> closed;
  for (std::size_t i = 1; i < ranked2.size(); ++i) {
    if (labels[i] == labels[i - 1]) {
      v.expect(ranked2[i - 1].cost <= ranked2[i].cost, "within-cluster order broken");
    } else {
      closed.insert(labels[i - 1]);
      v.expect(!closed.count(labels[i]), "cluster split");
    }
  }
  v.summary = "schemes I-IV on cars sort (" + std::to_string(sort_cands.size()) + " charts), 5-chart and 6-chart traces";
  return v;
}

CostTable random_table(std::mt19937& rng) {
  std::uniform_real_distribution<double> step(0.1, 3.0);
  CostTable t = CostTable::defaults();
  const double xy = step(rng);
  double c = xy;
  t.channel[Channel::x] = t.channel[Channel::y] = xy;
  for (Channel ch : {Channel::color, Channel::size, Channel::shape, Channel::text}) t.channel[ch] = c += step(rng);
  for (Channel ch : {Channel::theta, Channel::latitude, Channel::longitude}) t.channel[ch] = step(rng);
  double lowest = xy;
  for (const auto& [ch, cost] : t.channel) lowest = std::min(lowest, cost);
  t.swap_cost = lowest * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  for (auto& [k, cost] : t.transform) cost = step(rng);
  double r = 0;
  for (auto& cost : t.rank_costs) cost = r += step(rng);
  t.overlay = step(rng);
  t.validate();
  return t;
}

Verdict scaling_invariance() {
  Verdict v;
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> log_k(std::log(kScaleMin), std::log(kScaleMax));
  const Dataset cars = fixtures::cars();
  const CostTable base = CostTable::defaults();
  const auto sort_cands = candidates(cars, {"Cylinders", "Horsepower", "Origin"}, AnalyticTask::sort, base);
  std::map<AnalyticTask, std::vector<ScoredSpec>> per_task;
  for (AnalyticTask t : {AnalyticTask::sort, AnalyticTask::comparison, AnalyticTask::magnitude}) {
    per_task[t] = candidates(cars, {"Cylinders", "Horsepower", "Origin"}, t, base);
  }
  const std::set<std::string> interested = {"Cylinders", "Origin"};
  for (std::size_t i = 0; i < kScalingTables; ++i) {
    const CostTable table = random_table(rng);
    const ClusterParams params{std::uniform_real_distribution<double>(0.5, 3.0)(rng), 1 + rng() % 3};
    const double k = std::exp(log_k(rng));
    const CostTable scaled = table.scaled(k);
    const auto a = rescored(sort_cands, table);
    const auto b = rescored(sort_cands, scaled);
    const std::string tag = "table " + std::to_string(i) + " k=" + std::to_string(k);
    v.expect(keys(rank_complexity(a)) == keys(rank_complexity(b)), tag + ": scheme I");
    v.expect(keys(rank_reverse_complexity(a, params, table)) == keys(rank_reverse_complexity(b, params.scaled(k), scaled)),
             tag + ": scheme II");
    v.expect(keys(rank_interest(a, interested)) == keys(rank_interest(b, interested)), tag + ": scheme III");
    std::map<AnalyticTask, std::vector<ScoredSpec>> la;
    std::map<AnalyticTask, std::vector<ScoredSpec>> lb;
    for (const auto& [t, list] : per_task) {
      la[t] = rescored(list, table);
      lb[t] = rescored(list, scaled);
    }
    v.expect(keys(rank_task_coverage(merge_dedup(la))) == keys(rank_task_coverage(merge_dedup(lb))), tag + ": scheme IV");
  }
  v.summary = std::to_string(kScalingTables) + " random tables, k in [" + std::to_string(kScaleMin).substr(0, 5) + ", " +
              std::to_string(static_cast<int>(kScaleMax)) + "], four orderings compared";
  return v;
}

Verdict combination() {
  Verdict v;
  const auto s = AnalyticTask::sort;
  const auto c = AnalyticTask::comparison;
  const auto t = AnalyticTask::trend;
  {
    // r1 covers two tasks and leads; r2 is then redundant; r3 completes.
    const auto out = combine({fake("r1", 5, {"A", "B"}, {s, c}), fake("r2", 1, {"A"}, {s}), fake("r3", 2, {"C"}, {s}),
                              fake("r4", 3, {"B", "C"}, {s})},
                             {"A", "B", "C"});
    v.expect(keys(out.charts) == std::vector<std::string>{"r1", "r3"} && out.iterations == 2 && out.comparisons == 6 &&
                 out.complete,
             "trace 1");
  }
  {
    // Equal coverage ties on cost; b then d.
    const auto out = combine(
        {fake("a", 4, {"X", "Y"}, {t}), fake("b", 1, {"X"}, {t}), fake("c", 2, {"X"}, {t}), fake("d", 3, {"Y", "Z"}, {t})},
        {"X", "Y", "Z"});
    v.expect(keys(out.charts) == std::vector<std::string>{"b", "d"} && out.complete, "trace 2");
  }
  {
    // D is in no chart, so coverage can never complete.
    const auto out = combine({fake("a", 1, {"A"}, {s}), fake("b", 2, {"A", "B"}, {s})}, {"A", "D"});
    v.expect(keys(out.charts) == std::vector<std::string>{"a", "b"} && !out.complete && out.iterations == 2 &&
                 out.covered_columns == std::set<std::string>{"A", "B"},
             "trace 3 (impossible)");
  }
  std::mt19937 rng(99);
  const std::vector<std::string> columns = {"a", "b", "c", "d", "e", "f"};
  for (std::size_t round = 0; round < kCombineRandomRounds; ++round) {
    std::vector<ScoredSpec> recs;
    const std::size_t n = rng() % 14;
    for (std::size_t i = 0; i < n; ++i) {
      std::set<std::string> fields{columns[rng() % columns.size()]};
      for (const auto& col : columns) {
        if (rng() % 3 == 0) fields.insert(col);
      }
      recs.push_back(fake("k" + std::to_string(i), 1 + rng() % 9, fields, {kAllTasks[rng() % kAllTasks.size()]}));
    }
    std::set<std::string> interested;
    for (const auto& col : columns) {
      if (rng() % 2) interested.insert(col);
    }
    const auto out = combine(recs, interested);
    v.expect(out.iterations <= recs.size(), "iterations exceed candidates in round " + std::to_string(round));
  }
  const Dataset ds = fixtures::load("hollywood.csv");
  CombinationInputs in;
  in.rules = &fixtures::rules();
  const auto out = recommend_combination(ds, {}, std::nullopt, in);
  const auto names = ds.field_names();
  v.expect(out.complete && out.covered_columns == std::set<std::string>(names.begin(), names.end()),
           "hollywood coverage incomplete");
  v.summary = "3 traces exact, " + std::to_string(kCombineRandomRounds) + " random bounds, hollywood " +
              std::to_string(out.covered_columns.size()) + "/" + std::to_string(names.size()) + " columns in " +
              std::to_string(out.charts.size()) + " charts";
  return v;
}

// Every distinct document the engine emits over the fixtures, for one version.
std::size_t write_documents(VegaLiteVersion version, const fs::path& dir) {
  EngineConfig cfg = engine_config();
  cfg.version = version;
  const Engine engine(cfg);
  std::set<std::string> seen;
  auto keep = [&](const RecommendationResponse& res) {
    for (const auto& c : res.charts) {
      const std::string text = c.vegalite.dump(2);
      if (!seen.insert(text).second) continue;
      char name[32];
      std::snprintf(name, sizeof name, "%05zu.vl.json", seen.size());
      std::ofstream(dir / name) << text;
    }
  };
  for (const auto& ds : fixtures::all_datasets()) {
    RecommendationRequest req;
    req.dataset_id = ds.id();
    req.columns = ds.field_names();
    for (AnalyticTask t : enumerable_tasks()) {
      req.tasks = {t};
      keep(engine.recommend(ds, req));
    }
    req.tasks.clear();
    req.mode = Mode::combination;
    keep(engine.recommend(ds, req));
  }
  return seen.size();
}

Verdict emission() {
  Verdict v;
  std::string counts;
  for (auto [version, schema] : {std::pair{VegaLiteVersion::v5, "vega-lite-v5.schema.json"},
                                 std::pair{VegaLiteVersion::v4, "vega-lite-v4.schema.json"}}) {
    const fs::path dir = scratch(schema);
    const std::size_t n = write_documents(version, dir);
    const int code = shell(quote(TASKVIS_PYTHON) + " " + quote(TASKVIS_VALIDATOR) + " " +
                           quote(std::string(TASKVIS_SCHEMA_DIR) + "/" + schema) + " " + quote(dir.string()) +
                           " > " + quote((dir / "report.txt").string()) + " 2>&1");
    std::ifstream report_in(dir / "report.txt");
    const std::string report((std::istreambuf_iterator<char>(report_in)), std::istreambuf_iterator<char>());
    v.expect(report.find("checked " + std::to_string(n) + " ") != std::string::npos, "validator did not see every document");
    if (code != 0) {
      std::ifstream in(dir / "report.txt");
      std::string line;
      while (std::getline(in, line)) v.expect(false, line);
      v.expect(false, std::string(schema) + " validator exit " + std::to_string(code));
    }
    // The validator must reject a document with a bogus mark.
    const fs::path bad = dir / "broken.json";
    std::ofstream(bad) << R"({"mark": 42, "data": {"values": []}})";
    v.expect(shell(quote(TASKVIS_PYTHON) + " " + quote(TASKVIS_VALIDATOR) + " " +
                   quote(std::string(TASKVIS_SCHEMA_DIR) + "/" + schema) + " " + quote(bad.string()) + " > /dev/null") == 1,
             std::string(schema) + " accepted a broken document");
    counts += (counts.empty() ? "" : ", ") + std::to_string(n) + " against " + schema;
    if (code == 0) fs::remove_all(dir);
  }

  const fs::path a = scratch("cli-a");
  const fs::path b = scratch("cli-b");
  const std::string args = " recommend --data " + quote(fixtures::path("covid.csv")) + " --tasks trend,sort,comparison --out ";
  v.expect(shell(quote(TASKVIS_CLI) + args + quote(a.string()) + " > /dev/null") == 0, "first CLI run failed");
  v.expect(shell(quote(TASKVIS_CLI) + args + quote(b.string()) + " > /dev/null") == 0, "second CLI run failed");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / e.path().filename();
    v.expect(fs::exists(other) && read_file(e.path().string()) == read_file(other.string()),
             e.path().filename().string() + " differs between runs");
  }
  v.expect(files > 1, "CLI wrote no charts");
  fs::remove_all(a);
  fs::remove_all(b);
  v.summary = counts + "; " + std::to_string(files) + " CLI files byte-identical across two runs";
  return v;
}

Verdict rule_dsl() {
  using namespace taskvis::rules;
  Verdict v;
  const RuleSet all = fixtures::rules().all();
  const std::string text = format_ruleset(all);
  const RuleSet again = parse_rules(text);
  v.expect(again == all, "parse(format(base)) differs");
  v.expect(format_ruleset(again) == text, "format is not a fixpoint");

  auto atoms = [](std::initializer_list<Atom> list) {
    AtomSet s;
    for (const auto& a : list) s.insert(a);
    return s;
  };
  auto a1 = [](const std::string& p, const std::string& x) { return atom(p, {x}); };
  auto a2 = [](const std::string& p, const std::string& x, const std::string& y) { return atom(p, {x, y}); };
  const std::string sort_text = ":- task(sort), not mark(bar).";
  const std::string shape_text = ":- channel(E, shape), not type(E, nominal).";
  const std::string temporal_text = ":- channel(E, x), not type(E, temporal), task(change_over_time).";
  struct Case {
    std::string rule;
    AtomSet set;
    bool violated;
  };
  const std::vector<Case> cases = {
      {sort_text, atoms({a1("task", "sort"), a1("mark", "line")}), true},
      {sort_text, atoms({a1("task", "sort"), a1("mark", "bar")}), false},
      {sort_text, atoms({a1("task", "trend"), a1("mark", "line")}), false},
      {shape_text, atoms({a2("channel", "e1", "shape"), a2("type", "e1", "quantitative")}), true},
      {shape_text, atoms({a2("channel", "e1", "shape"), a2("type", "e1", "nominal")}), false},
      {shape_text, atoms({a2("channel", "e1", "color"), a2("type", "e1", "quantitative")}), false},
      {temporal_text, atoms({a1("task", "change_over_time"), a2("channel", "e1", "x"), a2("type", "e1", "nominal")}), true},
      {temporal_text, atoms({a1("task", "change_over_time"), a2("channel", "e1", "x"), a2("type", "e1", "temporal")}), false},
      {temporal_text, atoms({a1("task", "trend"), a2("channel", "e1", "x"), a2("type", "e1", "nominal")}), false},
  };
  std::size_t right = 0;
  for (const auto& c : cases) {
    const RuleSet rs = parse_rules(c.rule);
    const auto& constraint = rs.constraints.at(0);
    const bool shipped = std::find(all.constraints.begin(), all.constraints.end(), constraint) != all.constraints.end();
    v.expect(shipped, c.rule + " is not in the shipped base");
    Substitution theta;
    const bool got = violates(c.set, constraint, &theta);
    v.expect(got == c.violated, c.rule + " on " + c.set.to_text());
    if (got && c.rule != sort_text) v.expect(!theta.empty() && theta[0].second == Term::sym("e1"), "witness is not e1");
    right += got == c.violated;
  }
  v.summary = std::to_string(all.constraints.size()) + " constraints round-trip; " + std::to_string(right) + "/" +
              std::to_string(cases.size()) + " rule cases";
  return v;
}

Verdict isolation() {
  Verdict v;
  ServiceLimits limits;
  Service service(engine_config(), limits);
  httplib::Server server;
  service.install(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  auto client = [&] {
    auto c = std::make_unique<httplib::Client>("127.0.0.1", port);
    c->set_read_timeout(300, 0);
    return c;
  };
  auto upload = [&](const std::string& body, const std::string& type) {
    auto res = client()->Post("/api/datasets", body, type);
    if (!res || res->status != 201) throw std::runtime_error("upload failed");
    return nlohmann::json::parse(res->body)["dataset_id"].get<std::string>();
  };
  const std::string cars = upload(read_file(fixtures::cars_path()), "application/json");
  const std::string covid = upload(read_file(fixtures::path("covid.csv")), "text/csv");

  // Each stream alternates between the two datasets with varied requests.
  std::vector<std::vector<std::string>> streams(kConcurrentStreams);
  for (int s = 0; s < kConcurrentStreams; ++s) {
    for (int r = 0; r < kRequestsPerStream; ++r) {
      const bool use_cars = (s + r) % 2 == 0;
      nlohmann::json req = {{"dataset_id", use_cars ? cars : covid}, {"max_charts", 3 + (s + r) % 5}};
      switch ((s * kRequestsPerStream + r) % 4) {
        case 0:
          req["tasks"] = {"sort"};
          break;
        case 1:
          req["tasks"] = {"trend", "comparison"};
          req["display_by_task"] = true;
          break;
        case 2:
          req["mode"] = "combination";
          break;
        default:
          req["tasks"] = {"characterize_distribution"};
          req["scheme"] = "reverse_complexity";
          break;
      }
      streams[s].push_back(req.dump());
    }
  }
  auto call = [&](httplib::Client& c, const std::string& body) {
    auto res = c.Post("/api/recommend", body, "application/json");
    return res ? std::to_string(res->status) + " " + res->body : std::string("transport error");
  };

  std::vector<std::vector<std::string>> serial(kConcurrentStreams);
  auto c = client();
  for (int s = 0; s < kConcurrentStreams; ++s) {
    for (const auto& body : streams[s]) serial[s].push_back(call(*c, body));
  }
  std::vector<std::vector<std::string>> concurrent(kConcurrentStreams);
  std::vector<std::thread> workers;
  for (int s = 0; s < kConcurrentStreams; ++s) {
    workers.emplace_back([&, s] {
      auto mine = client();
      for (const auto& body : streams[s]) concurrent[s].push_back(call(*mine, body));
    });
  }
  for (auto& w : workers) w.join();
  server.stop();
  listener.join();

  std::size_t ok = 0;
  for (int s = 0; s < kConcurrentStreams; ++s) {
    for (int r = 0; r < kRequestsPerStream; ++r) {
      v.expect(serial[s][r].rfind("200 ", 0) == 0, "serial request failed: " + serial[s][r].substr(0, 120));
      v.expect(serial[s][r] == concurrent[s][r], "stream " + std::to_string(s) + " request " + std::to_string(r) + " differs");
      ok += serial[s][r] == concurrent[s][r];
    }
  }
  v.summary = std::to_string(kConcurrentStreams) + " streams x " + std::to_string(kRequestsPerStream) +
              " requests over two datasets, " + std::to_string(ok) + " identical to serial";
  return v;
}

}  // namespace

int main() {
  report(1, "golden stacked bar", golden);
  report(2, "task-mark conformance", mark_conformance);
  report(3, "rule soundness and completeness", oracle_equality);
  report(4, "no-aggregation tasks", no_aggregation);
  report(5, "change_over_time gate", temporal_gate);
  report(6, "ranking scheme properties", ranking_properties);
  report(7, "cost scaling invariance", scaling_invariance);
  report(8, "combination fidelity", combination);
  report(9, "emission validity and determinism", emission);
  report(10, "rule DSL", rule_dsl);
  report(11, "service isolation", isolation);
  std::printf("%d of 11 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
