#pragma once

#include <functional>
#include <string>
#include <vector>

#include "support.hpp"

namespace ruelle::cli {

// A subcommand returns 0 when its assertions hold and 1 otherwise; errors
// propagate as ConfigError / ResolutionError / CertificateError. `summary`
// is printed on stdout when non-null.
struct Command {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;
  std::function<int(const Context&, json& summary)> run;
};

const std::vector<Command>& commands();

}  // namespace ruelle::cli
