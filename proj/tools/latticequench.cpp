#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "lq/config.hpp"
#include "lq/error.hpp"
#include "lq/run.hpp"

namespace {

int run_mode(const std::string& mode, const std::string& config_path, const std::map<std::string, std::string>& flags) {
  lq::RunConfig c;
  if (!config_path.empty()) c = lq::load_config(config_path);
  c.mode = mode;
  for (const auto& [k, v] : flags) lq::set_field(c, k, v);
  const auto out = lq::run(c, std::cerr);
  std::cout << out.manifest << '\n';
  return 0;
}

int list_recipes(const std::string& name, bool execute, const std::string& out_dir, int jobs) {
  if (name.empty()) {
    for (const auto& r : lq::recipes()) std::cout << r.name << "  " << r.description << '\n';
    return 0;
  }
  const auto& r = lq::find_recipe(name);
  if (!execute) {
    std::cout << "# " << r.name << ": " << r.description << '\n';
    for (std::size_t i = 0; i < r.configs.size(); ++i) {
      std::cout << "\n# config " << i << '\n' << lq::serialize(r.configs[i]);
    }
    return 0;
  }
  for (const auto& o : lq::run_recipe(r, out_dir, jobs, std::cerr)) std::cout << o.manifest << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-boson optical-lattice interaction quench simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> flags;
  for (const auto& mode : lq::kModes) {
    auto* sub = app.add_subcommand(mode, "run mode " + mode);
    sub->add_option("-c,--config", config_path, "config file (key = value with [sections])");
    for (const auto& key : lq::field_names()) {
      if (key == "mode") continue;
      sub->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; },
                                            "override " + key);
    }
  }

  std::string recipe_name, recipe_out = "out";
  bool recipe_run = false;
  int recipe_jobs = 0;
  auto* rec = app.add_subcommand("recipes", "list recipes, show one, or run it with --run");
  rec->add_option("name", recipe_name, "recipe name");
  rec->add_flag("--run", recipe_run, "execute the recipe");
  rec->add_option("--out_dir", recipe_out, "output root");
  rec->add_option("--jobs", recipe_jobs, "worker threads (0: recipe default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (rec->parsed()) return list_recipes(recipe_name, recipe_run, recipe_out, recipe_jobs);
    for (const auto& mode : lq::kModes) {
      if (app.got_subcommand(mode)) return run_mode(mode, config_path, flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lq::exit_code_for_current_exception();
  }
  return 2;
}
