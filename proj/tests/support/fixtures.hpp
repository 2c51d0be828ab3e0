#pragma once
// Paths and loaders shared by the test binaries.

#include <string>
#include <vector>

#include "taskvis/taskvis.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(TASKVIS_FIXTURE_DIR) + "/" + name; }
inline std::string cars_path() { return TASKVIS_CARS_FILE; }

inline taskvis::Dataset load(const std::string& name) { return taskvis::load_dataset_file(path(name)); }
inline taskvis::Dataset cars() { return taskvis::load_dataset_file(TASKVIS_CARS_FILE); }

inline const taskvis::RuleBase& rules() {
  static const taskvis::RuleBase rb = taskvis::RuleBase::load(TASKVIS_DEFAULT_RULES_DIR);
  return rb;
}

// Every CSV fixture plus the cars records.
inline std::vector<std::string> all_names() {
  return {"covid.csv", "hollywood.csv", "happiness.csv", "toy2.csv", "toy3.csv", "toy3q.csv", "geo3.csv"};
}

// Fixtures small enough for the brute-force oracle.
inline std::vector<std::string> small_names() { return {"toy2.csv", "toy3.csv", "toy3q.csv", "geo3.csv"}; }

inline std::vector<taskvis::Dataset> all_datasets() {
  std::vector<taskvis::Dataset> out{cars()};
  for (const auto& n : all_names()) out.push_back(load(n));
  return out;
}

}  // namespace fixtures
