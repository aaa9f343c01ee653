/*
 * Copyright 2026 The rscam Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// rscam: rolling-shutter camera geometry from the command line.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.h"
#include "rscam/errors.h"

namespace {

using rscam::cli::json;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  rscam::cli::Output out;
  std::optional<std::uint64_t> seed;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling-shutter camera geometry toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rscam 0.1.0");

  Common common;
  bool print_config = false;
  std::optional<int> trials, threads;

  using Command = std::function<int(const json&, const rscam::cli::Output&)>;
  std::map<CLI::App*, Command> commands;
  auto add = [&](const std::string& name, const std::string& help,
                 Command fn, bool dir_output) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", common.config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", common.overrides,
                    "Override a config value, e.g. motion.velocity_kmh=[0,7.5,0]");
    sub->add_option("--seed", common.seed, "Random seed (config key 'seed')");
    sub->add_flag("--print-config", print_config,
                  "Print the resolved config and exit");
    sub->add_option("-o,--output", common.out.file,
                    "Write the table here instead of stdout");
    if (dir_output) {
      sub->add_option("--out-dir", common.out.dir, "Output directory");
    }
    commands[sub] = std::move(fn);
    return sub;
  };

  add("project", "Perspective and rolling-shutter image of world points",
      rscam::cli::cmd_project, false);
  add("render-checker",
      "Render a checkerboard seen by a camera spinning about its axis",
      rscam::cli::cmd_render_checker, true);
  add("calibrate-sim", "Simulated LED scan-rate calibration",
      rscam::cli::cmd_calibrate_sim, true);
  CLI::App* sfm = add("sfm-grid",
                      "Two-view bundle-adjustment experiment over speed and noise",
                      rscam::cli::cmd_sfm_grid, true);
  sfm->add_option("--trials", trials, "Trials per cell (sfm.trials)");
  sfm->add_option("--threads", threads, "Worker threads (sfm.threads)");
  add("flow", "Analytic and finite-difference optical flow on a grid",
      rscam::cli::cmd_flow, false);
  add("slits", "Crossed-slit incidence of back-projected rays",
      rscam::cli::cmd_slits, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::vector<std::string> overrides = common.overrides;
    if (common.seed) overrides.push_back("seed=" + std::to_string(*common.seed));
    if (trials) overrides.push_back("sfm.trials=" + std::to_string(*trials));
    if (threads) overrides.push_back("sfm.threads=" + std::to_string(*threads));
    const json config =
        rscam::cli::resolve_config(common.config_path, overrides);
    if (print_config) {
      std::cout << config.dump(2) << "\n";
      return 0;
    }
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(config, common.out);
    }
    return 1;
  } catch (const rscam::ConfigError& e) {
    std::cerr << "rscam: configuration error: " << e.what() << "\n";
    return 1;
  } catch (const rscam::Error& e) {
    std::cerr << "rscam: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "rscam: configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rscam: invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "rscam: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "rscam: " << e.what() << "\n";
    return 1;
  }
}
