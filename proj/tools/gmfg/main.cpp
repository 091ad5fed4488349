#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "gmfg/errors.hpp"
#include "gmfg/experiment.hpp"
#include "gmfg/parallel.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw gmfg::ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary mean-field auction experiments: solvers, presets and summaries"};
  app.require_subcommand(1);

  std::string preset, seeds, out, config_file;
  std::vector<std::string> sets;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run a preset over its seed list");
  run->add_option("preset", preset, "Preset name (see list-presets)")->required();
  run->add_option("--set", sets, "Override a config key, section.key=value (repeatable)");
  run->add_option("--seeds", seeds, "Comma-separated seeds; a..b expands to a range");
  run->add_option("--out", out, "Output directory (default runs/<preset>)");
  run->add_option("--config", config_file, "Config file applied on top of the preset");
  run->add_option("--threads", threads, "Worker threads for the seed fan-out (default: OpenMP)");

  std::string dir;
  auto* summarize = app.add_subcommand("summarize", "Recompute summary.csv and final.csv for a run directory");
  summarize->add_option("dir", dir, "Run directory")->required();

  auto* list = app.add_subcommand("list-presets", "List the available presets");

  std::string show_name;
  auto* show = app.add_subcommand("show-config", "Print a preset's canonical config and hash");
  show->add_option("preset", show_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*list) {
      for (const auto& p : gmfg::exp::presets()) std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
    if (*show) {
      const auto cfg = gmfg::exp::preset_config(show_name);
      std::cout << "# hash " << gmfg::exp::hex64(cfg.hash()) << "\n" << cfg.canonical();
      return 0;
    }
    if (*summarize) {
      for (const auto& f : gmfg::exp::summarize(dir)) std::cout << f.string() << "\n";
      return 0;
    }
    auto cfg = gmfg::exp::preset_config(preset);
    if (!config_file.empty()) cfg = gmfg::exp::Config::parse(slurp(config_file), cfg);
    gmfg::exp::RunOptions options;
    options.overrides = sets;
    options.out = out;
    if (!seeds.empty()) {
      auto tmp = gmfg::exp::Config::defaults();
      tmp.set("evaluation.seeds", seeds);
      options.seeds = tmp.seeds("evaluation.seeds");
    }
    if (threads > 0) gmfg::set_threads(threads);
    const auto report = gmfg::exp::run_config(cfg, options);
    std::cout << "wrote " << report.files.size() << " files to " << report.dir.string() << "\n";
    return 0;
  } catch (const gmfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const gmfg::UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}
