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

#include <vector>

#include "flowsep/casorati.hpp"
#include "flowsep/linops.hpp"

namespace flowsep {

/// Power values at or below zero map to this level (dB).
inline constexpr double kPowerFloorDb = -300.0;

/// Power Doppler image in dB, nz x nx.
struct PowerDopplerImage {
  RealImage db;
  double dynamic_range = 35.0;
};

/// 10 log10 of the per-pixel temporal mean of |B|^2, clamped at
/// kPowerFloorDb.
PowerDopplerImage power_doppler(const CasoratiMatrix& b, double dynamic_range = 35.0);

/// Display form: shifted so the maximum is 0 dB and floored at
/// -dynamic_range.
PowerDopplerImage display_image(const PowerDopplerImage& img);

/// ||ref - est||_F / ||ref||_F on the dB values. Throws
/// std::invalid_argument on a dim mismatch or an all-zero reference.
double nrmse(const PowerDopplerImage& ref, const PowerDopplerImage& est);

/// 10 log10(d_max^2 / MSE); +infinity when the images agree exactly.
double psnr(const PowerDopplerImage& ref, const PowerDopplerImage& est, double d_max = 35.0);

struct QualityScores {
  double nrmse = 0.0;
  double psnr = 0.0;
};

/// NRMSE and PSNR between the display forms of two images.
QualityScores compare_display(const PowerDopplerImage& truth, const PowerDopplerImage& estimate);

struct PatchRect {
  Index top = 0;
  Index left = 0;
  Index height = 13;
  Index width = 12;
};

/// 20 log10(mu_R2 / mu_R1), with the means taken over linear power of the
/// display-floored image.
double contrast_ratio(const PowerDopplerImage& img, const PatchRect& background, const PatchRect& target);

struct CrSweep {
  std::vector<double> values;  ///< row-major over the patch grid
  Index patch_rows = 0;
  Index patch_cols = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Tiles the image with non-overlapping patch_h x patch_w patches (row
/// major, leftover border dropped) and computes the CR of each against the
/// fixed background patch.
CrSweep cr_sweep(const PowerDopplerImage& img, const PatchRect& background, Index patch_h = 13, Index patch_w = 12);

/// Linear-interpolated quantile (q in [0, 1]) of unsorted values.
double quantile(std::vector<double> values, double q);

/// Normalized cross-correlation |<a, b>| / (||a|| ||b||) after shifting b so
/// the peaks of |a| and |b| coincide. 1 means identical up to scale and
/// phase.
double kernel_correlation(const Psf& a, const Psf& b);

}  // namespace flowsep
