// taskvis: command-line front end.
//
//   taskvis recommend --data cars.json --columns Cylinders,Horsepower,Origin --tasks sort --out charts/
//   taskvis serve --port 8080
//   taskvis tasks

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "taskvis/http.hpp"
#include "taskvis/taskvis.hpp"

#ifndef TASKVIS_DEFAULT_RULES_DIR
#define TASKVIS_DEFAULT_RULES_DIR "rules"
#endif
#ifndef TASKVIS_DEFAULT_COST_FILE
#define TASKVIS_DEFAULT_COST_FILE "config/costs.json"
#endif
#ifndef TASKVIS_DEFAULT_MAP_FILE
#define TASKVIS_DEFAULT_MAP_FILE "data/maps/us-10m.json"
#endif

namespace fs = std::filesystem;
using namespace taskvis;

namespace {

constexpr int kInputError = 2;

// Thrown for anything the user typed wrong; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class Range, class Fn>
std::string vocabulary(const Range& items, Fn name) {
  std::string out;
  for (const auto& it : items) {
    if (!out.empty()) out += ", ";
    out += std::string(name(it));
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Value operand(const std::string& text) {
  if (auto n = detail::parse_number(text)) return *n;
  return text;
}

std::optional<FilterOp> filter_op(const std::string& word) {
  static const std::map<std::string, FilterOp> kSymbols = {{"=", FilterOp::eq},  {"==", FilterOp::eq},
                                                          {"!=", FilterOp::neq}, {"<", FilterOp::lt},
                                                          {"<=", FilterOp::le}, {">", FilterOp::gt},
                                                          {">=", FilterOp::ge}};
  if (auto it = kSymbols.find(word); it != kSymbols.end()) return it->second;
  return parse_filter_op(word);
}

// "field op value" where value is comma separated for `in` and `between`.
// The field may contain spaces; the first token that names an operator
// splits it from the value.
FilterPredicate parse_filter(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  for (std::string w; in >> w;) words.push_back(w);
  for (std::size_t i = 1; i + 1 < words.size(); ++i) {
    auto op = filter_op(words[i]);
    if (!op) continue;
    FilterPredicate p;
    p.op = *op;
    for (std::size_t j = 0; j < i; ++j) p.field += (j ? " " : "") + words[j];
    std::string value;
    for (std::size_t j = i + 1; j < words.size(); ++j) value += (j > i + 1 ? " " : "") + words[j];
    if (p.op == FilterOp::in || p.op == FilterOp::between) {
      for (const auto& v : split(value, ',')) p.operands.push_back(operand(v));
    } else {
      p.operands.push_back(operand(value));
    }
    return p;
  }
  throw UsageError("cannot read filter \"" + text + "\"; expected \"field op value\" with op one of =, !=, <, <=, >, >=, " +
                   vocabulary(std::vector<FilterOp>{FilterOp::eq, FilterOp::neq, FilterOp::lt, FilterOp::le, FilterOp::gt,
                                                    FilterOp::ge, FilterOp::in, FilterOp::between},
                              [](FilterOp o) { return to_string(o); }));
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text << '\n';
}

struct RecommendArgs {
  std::string data;
  std::string columns;
  std::string tasks;
  std::string mode = "individual";
  std::string scheme = "default";
  std::size_t max_charts = 20;
  std::vector<std::string> filters;
  std::string out = "taskvis-out";
  bool display_by_task = false;
  std::string data_url;
  std::string rules_dir;
  std::string costs;
  std::string extra_rules;
  int vega_lite = 5;
};

int run_recommend(const RecommendArgs& a, const RuntimePaths& paths) {
  RecommendationRequest req;
  req.columns = split(a.columns, ',');
  for (const auto& name : split(a.tasks, ',')) {
    auto t = parse_task(name);
    if (!t) {
      throw UsageError("unknown task '" + name + "'; valid tasks: " +
                       vocabulary(kAllTasks, [](AnalyticTask x) { return to_string(x); }));
    }
    req.tasks.push_back(*t);
  }
  if (a.mode == "individual") {
    req.mode = Mode::individual;
  } else if (a.mode == "combination") {
    req.mode = Mode::combination;
  } else {
    throw UsageError("unknown mode '" + a.mode + "'; valid modes: individual, combination");
  }
  if (a.scheme != "default") {
    req.scheme = parse_scheme(a.scheme);
    if (!req.scheme) {
      const RankingScheme all[] = {RankingScheme::complexity, RankingScheme::reverse_complexity,
                                   RankingScheme::interest, RankingScheme::task_coverage};
      throw UsageError("unknown scheme '" + a.scheme + "'; valid schemes: default, " +
                       vocabulary(all, [](RankingScheme s) { return to_string(s); }));
    }
  }
  if (a.max_charts < 1) throw UsageError("--max must be at least 1");
  for (const auto& f : a.filters) req.filters.push_back(parse_filter(f));
  req.display_by_task = a.display_by_task;
  if (!a.extra_rules.empty()) req.extra_rules = read_file(a.extra_rules);
  req.max_charts = a.max_charts;

  EngineConfig cfg;
  cfg.rules_dir = a.rules_dir.empty() ? paths.rules_dir : a.rules_dir;
  cfg.cost_file = a.costs.empty() ? paths.cost_file : a.costs;
  if (!a.data_url.empty()) cfg.data_url = a.data_url;
  if (a.vega_lite == 4) {
    cfg.version = VegaLiteVersion::v4;
  } else if (a.vega_lite != 5) {
    throw UsageError("--vega-lite must be 4 or 5");
  }
  const Engine engine(cfg);

  const Dataset ds = load_dataset_file(a.data);
  req.dataset_id = ds.id();
  const auto response = engine.recommend(ds, req);

  const fs::path out(a.out);
  fs::create_directories(out);
  for (const auto& entry : fs::directory_iterator(out)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 8 && name.ends_with(".vl.json")) fs::remove(entry.path());
  }
  const auto index = manifest(response);
  for (std::size_t i = 0; i < response.charts.size(); ++i) {
    write_file(out / index["charts"][i]["file"].get<std::string>(), response.charts[i].vegalite.dump(2));
  }
  write_file(out / "manifest.json", index.dump(2));
  if (response.grouped_by_task) {
    nlohmann::ordered_json groups = nlohmann::ordered_json::object();
    for (const auto& [task, charts] : *response.grouped_by_task) {
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& c : charts) list.push_back(chart_to_json(c, false));
      groups[std::string(to_string(task))] = list;
    }
    write_file(out / "by_task.json", groups.dump(2));
  }
  std::cout << response.charts.size() << " chart(s) written to " << out.string()
            << (response.partial ? " (enumeration hit a limit; results are partial)" : "") << "\n";
  return 0;
}

int run_serve(const std::string& host, int port, const RuntimePaths& paths) {
  EngineConfig cfg;
  cfg.rules_dir = paths.rules_dir;
  cfg.cost_file = paths.cost_file;
  Service service(cfg);
  httplib::Server server;
  service.install(server);
  const std::string map_file = paths.map_file;
  server.Get("/data/maps/us-10m.json", [map_file](const httplib::Request&, httplib::Response& res) {
    try {
      res.set_content(read_file(map_file), "application/json");
    } catch (const std::exception& e) {
      res.status = 404;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  std::cout << "listening on " << host << ":" << port << std::endl;
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const RuntimePaths paths =
      RuntimePaths::from_env({TASKVIS_DEFAULT_RULES_DIR, TASKVIS_DEFAULT_COST_FILE, TASKVIS_DEFAULT_MAP_FILE, 8080});

  CLI::App app{"Task-oriented chart recommendation"};
  app.require_subcommand(1);

  RecommendArgs rec;
  auto* recommend = app.add_subcommand("recommend", "Recommend charts for a data file");
  recommend->add_option("--data", rec.data, "CSV or JSON record-array file")->required();
  recommend->add_option("--columns", rec.columns, "Comma-separated columns of interest");
  recommend->add_option("--tasks", rec.tasks, "Comma-separated analytic tasks");
  recommend->add_option("--mode", rec.mode, "individual or combination");
  recommend->add_option("--scheme", rec.scheme, "complexity, reverse_complexity, interest, task_coverage or default");
  recommend->add_option("--max", rec.max_charts, "Maximum number of charts");
  recommend->add_option("--filter", rec.filters, "\"field op value\"; repeatable");
  recommend->add_option("--out", rec.out, "Output directory");
  recommend->add_flag("--display-by-task", rec.display_by_task, "Also write per-task lists to by_task.json");
  recommend->add_option("--data-url", rec.data_url, "Reference data by URL instead of inlining it");
  recommend->add_option("--rules-dir", rec.rules_dir, "Rule base directory");
  recommend->add_option("--costs", rec.costs, "Cost table file");
  recommend->add_option("--rules", rec.extra_rules, "Extra constraints file in the rule language");
  recommend->add_option("--vega-lite", rec.vega_lite, "Target Vega-Lite major version (4 or 5)");

  std::string host = "0.0.0.0";
  int port = paths.port;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (defaults to TASKVIS_PORT or 8080)");

  auto* tasks = app.add_subcommand("tasks", "List analytic tasks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*recommend) return run_recommend(rec, paths);
    if (*serve) return run_serve(host, port, paths);
    if (*tasks) {
      std::cout << tasks_report().dump(2) << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const IngestionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const NotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConversionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
