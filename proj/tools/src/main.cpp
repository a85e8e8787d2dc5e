/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The flowsep Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "flowsep/types.hpp"

namespace {

using flowsep::cli::Command;
using flowsep::cli::Kind;
using flowsep::cli::RawArgs;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;

struct Bound {
  const Command* cmd = nullptr;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> text;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> opts;
  std::string config;
};

std::string help_for(const flowsep::cli::OptionSpec& s) {
  std::string h = s.help;
  if (!s.fallback.is_null()) h += " [" + (s.fallback.is_string() ? s.fallback.get<std::string>() : s.fallback.dump()) + "]";
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowsep: blood/tissue separation for ultrafast Doppler sequences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FLOWSEP_VERSION);
  bool force = false;
  app.add_flag("--force", force, "Overwrite files in a non-empty output directory");

  std::vector<std::unique_ptr<Bound>> bound;
  for (const Command& cmd : flowsep::cli::commands()) {
    auto b = std::make_unique<Bound>();
    b->cmd = &cmd;
    b->app = app.add_subcommand(cmd.name, cmd.summary);
    b->app->add_option("--config", b->config, "JSON file of parameters (flags take precedence)")->check(CLI::ExistingFile);
    for (const auto& spec : cmd.options) {
      const std::string flag = "--" + flowsep::cli::flag_name(spec.name);
      if (spec.kind == Kind::Flag) {
        b->opts[spec.name] = b->app->add_flag(flag, b->flags[spec.name], help_for(spec));
      } else {
        b->opts[spec.name] = b->app->add_option(flag, b->text[spec.name], help_for(spec));
      }
    }
    bound.push_back(std::move(b));
  }

  std::string manifest;
  std::string replay_out;
  bool no_verify = false;
  CLI::App* replay = app.add_subcommand("replay", "Re-run a command from its manifest and compare the outputs");
  replay->add_option("manifest", manifest, "manifest.json written by an earlier run")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Output directory")->required();
  replay->add_flag("--no-verify", no_verify, "Run even if an input changed since the manifest was written");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (replay->parsed()) {
      const auto r = flowsep::cli::replay(manifest, replay_out, !no_verify, force);
      if (!r.at("mismatched").empty()) {
        std::cerr << "replay: outputs differ from the manifest: " << r.at("mismatched").dump() << '\n';
        return kExitMismatch;
      }
      std::cout << "replay: " << r.at("outputs").get<std::size_t>() << " outputs reproduced bit-identically in "
                << replay_out << '\n';
      return 0;
    }
    for (const auto& b : bound) {
      if (!b->app->parsed()) continue;
      RawArgs raw;
      raw.config_path = b->config;
      for (const auto& [name, opt] : b->opts) {
        if (opt->count() == 0) continue;
        raw.given[name] = b->text.count(name) ? b->text.at(name) : (b->flags.at(name) ? "true" : "false");
      }
      const auto params = flowsep::cli::resolve_params(b->cmd->options, raw);
      const auto m = flowsep::cli::execute(*b->cmd, params, force);
      std::cout << b->cmd->name << ": " << m.at("outputs").size() << " files in " << params.at("out").get<std::string>()
                << " (" << m.at("wall_time_s").get<double>() << " s)\n";
    }
  } catch (const flowsep::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const flowsep::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
