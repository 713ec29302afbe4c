// ruelle: experiment runner. Exit status 0 when the subcommand's assertions
// hold, 1 on an assertion or certificate failure, 2 on a configuration
// error, 3 on a resolution error.
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ruelle/common.hpp"

namespace {

using namespace ruelle;
using namespace ruelle::cli;

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

// defaults < --config file < flags given on the command line.
FlatConfig resolve(const Command& cmd, const std::string& config_path,
                   const std::map<std::string, std::pair<CLI::Option*, std::string>>& flags) {
  FlatConfig r;
  std::set<std::string> known;
  for (const auto& k : cmd.keys) {
    r.set(k.key, k.fallback);
    known.insert(k.key);
  }
  for (const auto& [k, def] : std::map<std::string, std::string>{{"seed", "1"}, {"output_dir", "."}, {"format", "csv"}}) {
    r.set(k, def);
    known.insert(k);
  }
  if (!config_path.empty()) {
    const FlatConfig file = FlatConfig::load(config_path);
    file.require_known(known);
    for (const auto& [k, v] : file.entries()) r.set(k, v);
  }
  for (const auto& [k, opt] : flags)
    if (opt.first->count() > 0) r.set(k, opt.second);
  return r;
}

json manifest(const Context& ctx) {
  json cfg = json::object();
  for (const auto& [k, v] : ctx.cfg.entries()) cfg[k] = v;
  return {{"tool", "ruelle"}, {"version", version()}, {"command", ctx.command}, {"config", cfg}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for anisotropic transfer operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  // Global keys, accepted before or after the subcommand name.
  std::map<std::string, std::pair<CLI::Option*, std::string>> globals;
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file");
  for (const auto& [k, help] : std::vector<std::pair<std::string, std::string>>{
           {"seed", "random seed (default 1)"},
           {"output_dir", "output directory (default .)"},
           {"format", "table encoding: csv or json (default csv)"}}) {
    auto& slot = globals[k];
    slot.first = app.add_option(flag_name(k), slot.second, help);
  }

  std::vector<std::map<std::string, std::pair<CLI::Option*, std::string>>> flags(commands().size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands().size(); ++i) {
    const auto& cmd = commands()[i];
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->fallthrough();
    for (const auto& k : cmd.keys) {
      auto& slot = flags[i][k.key];
      slot.first = sub->add_option(flag_name(k.key), slot.second, k.help + " (default " +
                                                                      (k.fallback.empty() ? "none" : k.fallback) + ")");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const Command& cmd = commands()[i];
    try {
      auto all = flags[i];
      all.insert(globals.begin(), globals.end());
      Context ctx;
      ctx.command = cmd.name;
      ctx.cfg = resolve(cmd, config_path, all);
      ctx.out_dir = ctx.cfg.get_string("output_dir", ".");
      ctx.format = ctx.cfg.get_string("format", "csv");
      if (ctx.format != "csv" && ctx.format != "json") throw ConfigError("format must be csv or json");
      const long long seed = ctx.cfg.get_int("seed", 1);
      if (seed < 0) throw ConfigError("seed must be nonnegative");
      ctx.seed = static_cast<std::uint64_t>(seed);
      ctx.write_json("manifest.json", manifest(ctx));
      json summary;
      const int status = cmd.run(ctx, summary);
      if (!summary.is_null()) std::cout << summary.dump(2) << "\n";
      return status;
    } catch (const ConfigError& e) {
      std::cerr << "ruelle: config error: " << e.what() << "\n";
      return 2;
    } catch (const ResolutionError& e) {
      std::cerr << "ruelle: resolution error: " << e.what() << "\n";
      return 3;
    } catch (const CertificateError& e) {
      std::cerr << "ruelle: certificate failure: " << e.what() << "\n";
      return 1;
    } catch (const std::filesystem::filesystem_error& e) {
      std::cerr << "ruelle: " << e.what() << "\n";
      return 2;
    }
  }
  return 2;
}
