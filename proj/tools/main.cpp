#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "pvikit/errors.hpp"

namespace {

constexpr const char* kCommands[][2] = {
    {"gen", "generate a seeded synthetic train/test corpus"},
    {"pvi", "score every instance by pointwise V-information"},
    {"sweep", "static reduction sweep: prune easy instances, retrain, evaluate"},
    {"curriculum", "easy-to-hard progressive training per reduction ratio"},
    {"stats", "hypothesis length statistics and length buckets per label"},
    {"report", "plots from sweep, runtime and PVI CSVs"},
};

std::string flag_names(const std::string& key) {
  std::string hyphen = key;
  for (auto& ch : hyphen) {
    if (ch == '_') ch = '-';
  }
  return hyphen == key ? "--" + key : "--" + hyphen + ",--" + key;
}

}  // namespace

int main(int argc, char** argv) {
  using pvikit::cli::UsageError;

  CLI::App app{"pvikit: dataset difficulty, pruning and curricula via pointwise V-information"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::map<std::string, Sub> subs;
  for (const auto& [name, help] : kCommands) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.app->add_option("--config", s.config, "INI config file or a manifest.json from an earlier run");
    for (const auto& k : pvikit::cli::config_keys()) {
      s.options[k.key] =
          s.app->add_option(flag_names(k.key), s.values[k.key], k.help + " [" + k.default_value + "]")
              ->group(k.section);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "pvikit: " << e.what() << "\n";
    return 1;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      pvikit::cli::RawConfig raw;
      if (!s.config.empty()) {
        const std::string from = raw.merge_file(s.config);
        if (!from.empty() && from != name) {
          throw UsageError("manifest " + s.config + " belongs to '" + from + "', not '" + name + "'");
        }
      }
      for (const auto& [key, opt] : s.options) {
        if (opt->count() > 0) raw.set(key, s.values[key]);
      }
      pvikit::cli::run_command(name, raw);
      return 0;
    } catch (const UsageError& e) {
      std::cerr << "pvikit " << name << ": " << e.what() << "\n";
      return 1;
    } catch (const pvikit::DataError& e) {
      std::cerr << "pvikit " << name << ": " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "pvikit " << name << ": " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
