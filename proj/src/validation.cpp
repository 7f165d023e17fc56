#include "ttsa/validation.hpp"

#include <algorithm>
#include <sstream>

namespace ttsa {

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.passed; });
}

void ValidationReport::merge(const ValidationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

const AssumptionCheck* ValidationReport::find(const std::string& id) const {
  auto it = std::find_if(checks.begin(), checks.end(),
                         [&](const AssumptionCheck& c) { return c.id == id; });
  return it == checks.end() ? nullptr : &*it;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.id << "  measured=" << c.measured
       << "  threshold=" << c.threshold;
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << '\n';
  }
  return os.str();
}

}  // namespace ttsa
