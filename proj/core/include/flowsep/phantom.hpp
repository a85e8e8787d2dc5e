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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "flowsep/casorati.hpp"
#include "flowsep/linops.hpp"
#include "flowsep/metrics.hpp"

namespace flowsep {

/// Axially modulated Gaussian cos(2 pi fc z) exp(-z^2/2sz^2 - x^2/2sx^2)
/// sampled on a kh x kw grid centred at (kh/2, kw/2), unit energy.
/// Throws std::invalid_argument for even supports or non-positive sigmas.
Psf synth_psf(double fc_fraction, double sigma_z, double sigma_x, Index kh, Index kw);

struct Rect {
  Index top = 0;
  Index left = 0;
  Index height = 0;
  Index width = 0;

  [[nodiscard]] Index bottom() const noexcept { return top + height; }
  [[nodiscard]] Index right() const noexcept { return left + width; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct PsfShape {
  double fc_fraction = 0.1;
  double sigma_z = 1.5;
  double sigma_x = 2.0;
  Index rows = 15;
  Index cols = 15;

  [[nodiscard]] Psf make() const { return synth_psf(fc_fraction, sigma_z, sigma_x, rows, cols); }
  friend bool operator==(const PsfShape&, const PsfShape&) = default;
};

/// Static-tissue vessel phantom with two moving blood rectangles.
struct PhantomConfig {
  Index nz = 451;
  Index nx = 161;
  Index nt = 400;
  /// Anechoic lumen; blood rectangles must lie strictly inside it.
  Rect vessel{190, 0, 70, 161};
  Rect rect1{200, 20, 12, 70};
  Rect rect2{230, 100, 10, 35};
  /// Per-frame circular shift of each rectangle interior, uniform in
  /// [-max_shift, max_shift] on both axes, independent across frames.
  Index max_shift = 3;
  std::uint64_t seed = 0;
  /// Blood scatterer scale; unset means chosen so that blood/tissue
  /// scatterer energy per frame is blood_to_tissue_db.
  std::optional<double> blood_amplitude;
  double blood_to_tissue_db = -20.0;
  /// Fraction of tissue pixels holding a scatterer.
  double tissue_density = 0.5;
  PsfShape psf;
  /// Recorded only.
  StackMetadata metadata{0.0086, 0.0333, 12800.0};
  double sampling_mhz = 9.0;

  /// 451 x 161 x 400 with 12x70 and 10x35 rectangles.
  static PhantomConfig full_scale();
  /// 128 x 64 x 100; rectangle widths scaled to fit the narrower grid.
  static PhantomConfig desk_scale();

  /// Throws std::invalid_argument on invalid geometry.
  void validate() const;
};

/// Copy of `base` on an nz x nx x nt grid with the vessel and both
/// rectangles scaled proportionally, then nudged so the rectangles stay
/// strictly inside the vessel. The PSF shape is kept; validate() still
/// rejects grids too small for it.
PhantomConfig rescaled(const PhantomConfig& base, Index nz, Index nx, Index nt);

struct NoiseReport {
  double bsnr_db = 0.0;
  double sigma = 0.0;
  double empirical_bsnr_db = 0.0;
};

struct PhantomTruth {
  CasoratiMatrix s_observed;
  CasoratiMatrix x_true;
  CasoratiMatrix t_true;
  Psf psf_true;
  PowerDopplerImage pd_true;
  double blood_amplitude = 0.0;
  /// shifts[r][t] = {dz, dx} applied to rectangle r in frame t.
  std::array<std::vector<std::array<Index, 2>>, 2> shifts;
  std::optional<NoiseReport> noise;
};

/// Deterministic for a given config. t_true is the PSF-blurred static
/// tissue repeated over frames; s_observed = H x_true + t_true.
PhantomTruth simulate(const PhantomConfig& config);

/// Adds circular complex white Gaussian noise with variance
/// ||HX - mean(HX)||^2 / (N 10^(bsnr/10)), N = nz*nx*nt. +infinity
/// leaves the data untouched. Throws std::invalid_argument for NaN or
/// -infinity.
PhantomTruth add_noise_bsnr(const PhantomTruth& truth, double bsnr_db, std::uint64_t seed);

/// 10 log10(||HX - mean(HX)||^2 / ||noise||^2).
double empirical_bsnr_db(const ComplexMatrix& blurred_blood, const ComplexMatrix& noise);

}  // namespace flowsep
