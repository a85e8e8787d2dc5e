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

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace flowsep::cli {

using nlohmann::json;

/// Bad flags, config keys or missing inputs; reported with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Int, Double, String, Path, Flag };

/// One command parameter. A null default means "derived at run time" or,
/// with `required`, that the caller must supply it.
struct OptionSpec {
  std::string name;  ///< snake_case key; the flag is --name with '-' for '_'
  Kind kind;
  json fallback;
  std::string help;
  bool required = false;
  std::vector<std::string> choices;
};

std::string flag_name(const std::string& key);

/// Raw command-line state for one subcommand: the text given for every
/// flag that appeared, keyed by parameter name.
struct RawArgs {
  std::map<std::string, std::string> given;
  std::string config_path;
};

/// Defaults, then the JSON config file, then explicit flags. Paths are made
/// absolute so a manifest can be replayed from any directory. Throws
/// UsageError for unknown config keys, malformed values and missing
/// required parameters.
json resolve_params(const std::vector<OptionSpec>& specs, const RawArgs& raw);

/// Checks a params object (typically read back from a manifest) against
/// the table: every key known and well typed, required keys present.
void check_params(const std::vector<OptionSpec>& specs, const json& params);

/// Parses "a:step:b" (inclusive) or a comma list into BSNR levels in dB.
std::vector<double> parse_grid(const std::string& text);

}  // namespace flowsep::cli
