#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ruelle::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult()> run;
};

// The eleven acceptance criteria in order.
const std::vector<Criterion>& criteria();

// Runs the selected criteria (all when empty), timing each one.
std::vector<CriterionResult> run(const std::vector<int>& ids = {});

// "PASS  3  packet norm defect: ... [0.41 s]"
std::string format_line(const CriterionResult& r);

}  // namespace ruelle::acceptance
