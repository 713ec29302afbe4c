// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--allow-fail ID]... [ID]...
// Exit status is 0 when every criterion passes or fails only among the
// --allow-fail ids, 1 otherwise.
#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids, allowed;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--allow-fail" && i + 1 < argc) {
      allowed.push_back(std::atoi(argv[++i]));
    } else {
      ids.push_back(std::atoi(a.c_str()));
    }
  }
  int unexpected = 0, passed = 0;
  const auto results = ruelle::acceptance::run(ids);
  for (const auto& r : results) {
    std::cout << ruelle::acceptance::format_line(r) << std::endl;
    if (r.pass) {
      ++passed;
    } else if (std::find(allowed.begin(), allowed.end(), r.id) == allowed.end()) {
      ++unexpected;
    }
  }
  std::cout << passed << "/" << results.size() << " criteria pass";
  if (passed != static_cast<int>(results.size())) std::cout << " (" << unexpected << " unexpected failures)";
  std::cout << std::endl;
  return unexpected == 0 ? 0 : 1;
}
