#pragma once

#include <string>
#include <vector>

namespace ttsa {

struct AssumptionCheck {
  std::string id;        // e.g. "hurwitz:-A22"
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const;
  void add(AssumptionCheck check) { checks.push_back(std::move(check)); }
  void merge(const ValidationReport& other);
  const AssumptionCheck* find(const std::string& id) const;
  std::string to_text() const;
};

}  // namespace ttsa
