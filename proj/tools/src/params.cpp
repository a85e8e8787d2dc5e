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

#include "params.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace flowsep::cli {

namespace {

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

json convert(const OptionSpec& spec, const std::string& text) {
  const std::string where = "--" + flag_name(spec.name) + " '" + text + "'";
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case Kind::Int: {
        long long v = 0;
        try {
          v = std::stoll(text, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != text.size()) throw std::invalid_argument("expected an integer");
        return v;
      }
      case Kind::Double: {
        double v = 0.0;
        try {
          v = std::stod(text, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != text.size() || std::isnan(v)) throw std::invalid_argument("expected a number");
        return v;
      }
      case Kind::Flag:
        if (text == "true" || text == "1" || text.empty()) return true;
        if (text == "false" || text == "0") return false;
        throw std::invalid_argument("expected true or false");
      case Kind::Path:
        return std::filesystem::absolute(text).lexically_normal().string();
      case Kind::String:
        return text;
    }
  } catch (const std::exception& e) {
    throw UsageError("invalid value for " + where + ": " + e.what());
  }
  return nullptr;
}

bool well_typed(const OptionSpec& spec, const json& v) {
  if (v.is_null()) return true;
  switch (spec.kind) {
    case Kind::Int:
      return v.is_number_integer();
    case Kind::Double:
      return v.is_number();
    case Kind::Flag:
      return v.is_boolean();
    case Kind::Path:
    case Kind::String:
      return v.is_string();
  }
  return false;
}

void check_value(const OptionSpec& spec, const json& v) {
  if (!well_typed(spec, v)) throw UsageError("parameter " + spec.name + " has the wrong type: " + v.dump());
  if (!spec.choices.empty() && !v.is_null() &&
      std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end()) {
    std::string allowed;
    for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
    throw UsageError("--" + flag_name(spec.name) + " must be one of: " + allowed);
  }
}

const OptionSpec* find_spec(const std::vector<OptionSpec>& specs, const std::string& key) {
  for (const auto& s : specs) {
    if (s.name == key) return &s;
  }
  return nullptr;
}

void check_required(const std::vector<OptionSpec>& specs, const json& params) {
  for (const auto& s : specs) {
    if (s.required && params.at(s.name).is_null()) {
      throw UsageError("missing required option --" + flag_name(s.name));
    }
  }
}

}  // namespace

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

json resolve_params(const std::vector<OptionSpec>& specs, const RawArgs& raw) {
  json params = json::object();
  for (const auto& s : specs) params[s.name] = s.fallback;

  if (!raw.config_path.empty()) {
    std::ifstream f(raw.config_path);
    if (!f) throw UsageError("cannot read config file " + raw.config_path);
    json cfg;
    try {
      cfg = json::parse(f);
    } catch (const json::parse_error& e) {
      throw UsageError("config file " + raw.config_path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [k, v] : cfg.items()) {
      const std::string key = normalize_key(k);
      const OptionSpec* spec = find_spec(specs, key);
      if (spec == nullptr) throw UsageError("unknown key '" + k + "' in " + raw.config_path);
      json value = v;
      // Relative paths in a config file are relative to the file itself.
      if (spec->kind == Kind::Path && v.is_string()) {
        value = (std::filesystem::absolute(raw.config_path).parent_path() / v.get<std::string>())
                    .lexically_normal()
                    .string();
      }
      check_value(*spec, value);
      params[key] = value;
    }
  }

  for (const auto& [key, text] : raw.given) {
    const OptionSpec* spec = find_spec(specs, key);
    if (spec == nullptr) throw UsageError("unknown option --" + flag_name(key));
    json value = convert(*spec, text);
    check_value(*spec, value);
    params[key] = value;
  }
  check_required(specs, params);
  return params;
}

void check_params(const std::vector<OptionSpec>& specs, const json& params) {
  if (!params.is_object()) throw UsageError("params must be a JSON object");
  for (const auto& [k, v] : params.items()) {
    const OptionSpec* spec = find_spec(specs, k);
    if (spec == nullptr) throw UsageError("unknown parameter '" + k + "'");
    check_value(*spec, v);
  }
  for (const auto& s : specs) {
    if (!params.contains(s.name)) throw UsageError("parameter '" + s.name + "' missing");
  }
  check_required(specs, params);
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || std::isnan(v)) throw UsageError("bad BSNR grid '" + text + "'");
    return v;
  };
  std::vector<double> out;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const std::size_t a = text.find(':');
    const std::size_t b = text.find(':', a + 1);
    const double start = number(text.substr(0, a));
    const double step = number(text.substr(a + 1, b - a - 1));
    const double stop = number(text.substr(b + 1));
    if (!(step > 0.0) || stop < start) throw UsageError("BSNR grid needs step > 0 and stop >= start");
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    if (n > 10000) throw UsageError("BSNR grid too long");
    for (long long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  if (out.empty()) throw UsageError("empty BSNR grid");
  return out;
}

}  // namespace flowsep::cli
