#pragma once
// The shipped rule base on disk: base.rules plus tasks/<task>.rules.

#include <array>
#include <filesystem>
#include <string>

#include "taskvis/rules.hpp"
#include "taskvis/tasks.hpp"

namespace taskvis {

class RuleBase {
 public:
  static RuleBase load(const std::filesystem::path& dir) {
    RuleBase rb;
    rb.base_ = rules::load_rules_file((dir / "base.rules").string());
    for (AnalyticTask t : kAllTasks) {
      const auto file = dir / "tasks" / (std::string(to_string(t)) + ".rules");
      if (std::filesystem::exists(file)) rb.per_task_[static_cast<std::size_t>(t)] = rules::load_rules_file(file.string());
    }
    return rb;
  }

  const rules::RuleSet& base() const { return base_; }
  const rules::RuleSet& task_rules(AnalyticTask t) const { return per_task_[static_cast<std::size_t>(t)]; }

  // Base rules, the task's own rules and any user-supplied constraints.
  rules::RuleSet for_task(AnalyticTask t, const rules::RuleSet& extra = {}) const {
    rules::RuleSet out = base_;
    out.append(task_rules(t));
    out.append(extra);
    return out;
  }

  // Everything, for round-trip checks.
  rules::RuleSet all() const {
    rules::RuleSet out = base_;
    for (const auto& r : per_task_) out.append(r);
    return out;
  }

 private:
  rules::RuleSet base_;
  std::array<rules::RuleSet, kAllTasks.size()> per_task_;
};

}  // namespace taskvis
