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

#include "flowsep/casorati.hpp"
#include "flowsep/linops.hpp"
#include "flowsep/metrics.hpp"

/// On-disk formats. Sample data is raw little-endian with z fastest, then x,
/// then t, and no header; shape and metadata live in a JSON sidecar next to
/// it (same stem, ".json").
///
///   stack  <name>.iq   float32 (re, im) pairs        sidecar kind "iq-stack"
///   psf    <name>.iq   float32 (re, im) pairs        sidecar kind "psf"
///   pd     <name>.f64  float64 dB values             sidecar kind "power-doppler"
///          <name>.pgm  8-bit grayscale over the display range (display only)
namespace flowsep::io {

inline constexpr int kFormatVersion = 1;

/// Sidecar path for a data file: same directory and stem, ".json".
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

void write_stack(const std::filesystem::path& path, const IQStack& stack);
/// Accepts the data file or its sidecar. Throws std::runtime_error on I/O or
/// format errors.
IQStack read_stack(const std::filesystem::path& path);

void write_casorati(const std::filesystem::path& path, const CasoratiMatrix& m, const StackMetadata& meta = {});
CasoratiMatrix read_casorati(const std::filesystem::path& path);

void write_psf(const std::filesystem::path& path, const Psf& psf);
Psf read_psf(const std::filesystem::path& path);

/// Writes <stem>.f64, <stem>.json and <stem>.pgm for `path` = <stem>.f64.
void write_power_doppler(const std::filesystem::path& path, const PowerDopplerImage& img);
PowerDopplerImage read_power_doppler(const std::filesystem::path& path);

/// 8-bit quantization over [max - dynamic_range, max].
void write_pgm(const std::filesystem::path& path, const PowerDopplerImage& img);

}  // namespace flowsep::io
