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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "params.hpp"

namespace flowsep::cli {

struct Command {
  std::string name;
  std::string summary;
  std::vector<OptionSpec> options;
  /// Parameters naming input files whose digests go into the manifest.
  std::vector<std::string> inputs;
  /// Writes every output into `out` and returns command-specific results
  /// for the manifest (must not depend on wall time).
  json (*run)(const json& params, const std::filesystem::path& out);
  /// Cross-parameter checks that must fail before anything is written.
  void (*validate)(const json& params) = nullptr;
};

const std::vector<Command>& commands();
const Command& find_command(const std::string& name);

/// Runs the command into params["out"] and writes the manifest there.
/// The directory must be empty unless `force`, which first deletes the
/// regular files in it. Returns the manifest.
json execute(const Command& cmd, const json& params, bool force);

/// Re-runs a manifest into `out`. With `verify_inputs`, refuses to run when
/// an input file no longer matches its recorded digest.
/// Outputs whose digest differs from the recorded one are listed under
/// "mismatched" in the returned object.
json replay(const std::filesystem::path& manifest, const std::filesystem::path& out, bool verify_inputs, bool force);

}  // namespace flowsep::cli
