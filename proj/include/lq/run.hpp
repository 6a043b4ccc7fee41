#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lq/config.hpp"

namespace lq {

struct RunOutcome {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // relative to out_dir, in write order
  std::string manifest;            // path of manifest.json
};

// Executes one configuration. Output goes to $LATTICEQUENCH_OUT if set,
// otherwise config.out_dir. Throws ConfigError / NumericalError.
RunOutcome run(const RunConfig& config, std::ostream& log);

struct Recipe {
  std::string name;
  std::string description;
  std::vector<RunConfig> configs;  // each written to <out>/<name>/<index>
};

const std::vector<Recipe>& recipes();
const Recipe& find_recipe(const std::string& name);  // ConfigError lists valid names

// Runs every config of a recipe in <out_dir>/<name>/<index> (out_dir is
// replaced by $LATTICEQUENCH_OUT if set). jobs = 0 keeps the recipe value.
std::vector<RunOutcome> run_recipe(const Recipe& r, const std::string& out_dir, int jobs, std::ostream& log);

// Directory a run writes to.
std::filesystem::path resolve_out_dir(const std::string& configured);

int exit_code_for_current_exception();

}  // namespace lq
